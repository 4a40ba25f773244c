import json

import pytest

from fairshare.cli import main

GOODS = {"kind": "goods", "items": 4,
         "agents": [{"b": "2/5", "v": [4, 3, 3, 2]}, {"b": "3/5", "v": ["1", "2", "3", "4"]}]}
CHORES = {"kind": "chores", "items": 5,
          "agents": [{"b": "1/2", "v": [4, 3, 3, 2, 1]}, {"b": "1/3", "v": [1, 2, 3, 4, 5]},
                     {"b": "1/6", "v": [1, 1, 1, 1, 1]}]}
# m = 4 unit goods for three agents; (3/5)-scaled MMS-hat is infeasible here
HALFMMS = {"kind": "goods", "items": 4,
           "agents": [{"b": "41/120", "v": [1, 1, 1, 1]}, {"b": "41/120", "v": [1, 1, 1, 1]},
                      {"b": "19/60", "v": [1, 1, 1, 1]}]}


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, doc in (("goods", GOODS), ("chores", CHORES), ("halfmms", HALFMMS)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        out[name] = str(p)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({**GOODS, "agents": [{"b": "2/3", "v": [1, 1, 1, 1]},
                                                    {"b": "1/2", "v": [1, 1, 1, 1]}]}))
    out["bad"] = str(bad)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_share_mms(capsys, files):
    code, out = run(capsys, "share", "--kind", "mms-hat", files["goods"])
    assert code == 0
    assert out["value"] == "6" and sorted(map(sorted, out["partition"])) == [[0, 3], [1, 2]]


def test_share_personalized(capsys, files):
    code, out = run(capsys, "share", "--kind", "personalized", "--agent", "1", "--anchor", "0", files["goods"])
    assert code == 0 and out["anchor"] == 0


def test_personalized_table(capsys, files):
    code, out = run(capsys, "personalized", "--anchor", "0", files["chores"])
    assert code == 0 and len(out["shares"]) == 3


def test_allocate_goods(capsys, files):
    code, out = run(capsys, "allocate-goods", files["goods"])
    assert code == 0 and out["guarantee_met"]


def test_bid_play_random_needs_seed(capsys, files):
    code, out = run(capsys, "bid-play", "--tiebreak", "random", files["goods"])
    assert code == 1
    code, out = run(capsys, "bid-play", "--tiebreak", "random", "--seed", "3",
                    "--strategies", "optimal,const:1/5", files["goods"])
    assert code == 0 and out["strategies"] == ["optimal", "const:1/5"]


def test_bid_solve(capsys, files):
    code, out = run(capsys, "bid-solve", "--thresholds", files["goods"])
    assert code == 0
    assert out["value"] == "4" and out["threshold_checks_failed"] == []
    assert len(out["thresholds"]) == 16


def test_assign_chores(capsys, files):
    code, out = run(capsys, "assign-chores", files["chores"])
    assert code == 0
    assert len(out["costs"]) == 3 and out["rrr_shares"][2] == "1"
    code, out = run(capsys, "assign-chores", "--bobw", "--seed", "1", files["chores"])
    assert code == 0 and "sampled" in out


def test_exante(capsys, files):
    code, out = run(capsys, "exante-goods", files["goods"])
    assert code == 0 and len(out["lottery"]) == 2


def test_verify_fixture_and_catalog(capsys):
    code, out = run(capsys, "verify", "--fixture", "sylvester-tight")
    assert code == 0 and out["holds"]
    code, out = run(capsys, "fixtures")
    assert code == 0 and "lookahead" in [f["name"] for f in out["fixtures"]]


def test_verify_share_failure_exit_code(capsys, files):
    code, out = run(capsys, "verify", "--share", "mms-hat", "--factor", "3/5", files["halfmms"])
    assert code == 2 and out["feasible"] is False and out["allocations_checked"] == 81
    code, out = run(capsys, "verify", "--share", "mms-hat", "--factor", "1/2", files["halfmms"])
    assert code == 0 and out["feasible"]


def test_cap_exit_code(capsys, files):
    code, out = run(capsys, "--cap", "5", "verify", "--share", "mms", files["chores"])
    assert code == 3 and out["error"] == "resource cap exceeded"


def test_input_errors(capsys, files):
    assert run(capsys, "share", "--kind", "mms", files["bad"])[0] == 1
    assert run(capsys, "share", "--kind", "mms", "--agent", "9", files["goods"])[0] == 1
    assert run(capsys, "verify", "--fixture", "nope")[0] == 1
    assert run(capsys, "assign-chores", files["goods"])[0] == 1
    assert main(["no-such-command"]) == 1
    capsys.readouterr()


def test_output_is_reproducible(capsys, files):
    argv = ["assign-chores", "--bobw", "--seed", "5", files["chores"]]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
