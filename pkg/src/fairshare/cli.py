"""Command line entry point.  Every subcommand prints one JSON document.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import CHORES, GOODS, InstanceError, ResourceCapExceeded, format_rational as fr, parse_instance, to_rational

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_CAP = 0, 1, 2, 3


class VerificationFailed(Exception):
    def __init__(self, payload: dict):
        super().__init__("verification failed")
        self.payload = payload


def _load(path: str):
    return parse_instance(Path(path).read_text())


def _enc(x):
    if isinstance(x, Fraction):
        return fr(x)
    if isinstance(x, (list, tuple)):
        return [_enc(y) for y in x]
    if isinstance(x, dict):
        return {k: _enc(y) for k, y in x.items()}
    return x


def _agent(inst, i: int):
    if not 0 <= i < inst.n:
        raise InstanceError(f"agent {i} out of range 0..{inst.n - 1}")
    return inst.agents[i]


def cmd_share(args) -> dict:
    from .personalized import build_context, personalized_mms
    from .shares import DEFAULT_MMS_CAP, share_value

    inst = _load(args.instance)
    a = _agent(inst, args.agent)
    cap = args.cap or DEFAULT_MMS_CAP
    if args.kind == "personalized":
        anchor = _agent(inst, _anchor_index(args))
        ctx = build_context(inst.kind, anchor.valuation, anchor.entitlement, mms_cap=cap)
        value = personalized_mms(ctx, a.valuation, a.entitlement)
        return {"agent": args.agent, "kind": args.kind, "anchor": _anchor_index(args), "value": value}
    value = share_value(args.kind, a.valuation, a.entitlement, cap)
    out = {"agent": args.agent, "kind": args.kind, "value": value}
    parts = _mms_partition(args.kind, a, cap)
    if parts is not None:
        out["partition"] = [sorted(p) for p in parts]
    return out


def _anchor_index(args) -> int:
    return args.anchor if args.anchor is not None else args.agent


def _mms_partition(kind: str, a, cap: int):
    from .shares import chores_mms, mms, unit_lower_bound, unit_upper_bound

    b = a.entitlement
    if kind == "mms" and b.numerator == 1:
        return mms(a.valuation, b.denominator, cap).partition
    if kind == "mms-hat":
        return mms(a.valuation, unit_upper_bound(b).denominator, cap).partition
    if kind == "mms-bar":
        return chores_mms(a.valuation, unit_lower_bound(b).denominator, cap).partition
    return None


def cmd_personalized(args) -> dict:
    from .personalized import build_context, personalized_mms, personalized_ps, representative_count
    from .shares import DEFAULT_MMS_CAP

    inst = _load(args.instance)
    anchor = _agent(inst, args.anchor)
    ctx = build_context(inst.kind, anchor.valuation, anchor.entitlement, mms_cap=args.cap or DEFAULT_MMS_CAP)
    rows = []
    for j, a in enumerate(inst.agents):
        rows.append({
            "agent": j,
            "f": representative_count(ctx, a.entitlement),
            "mms": personalized_mms(ctx, a.valuation, a.entitlement),
            "ps": personalized_ps(inst.kind, ctx.k, a.valuation, a.entitlement),
        })
    return {"anchor": args.anchor, "k": ctx.k, "threshold": ctx.threshold, "shares": rows}


def _strategies(inst, listing: str | None, default: str):
    from .bidding.strategies import make_strategy

    names = listing.split(",") if listing else [default] * inst.n
    if len(names) != inst.n:
        raise ValueError(f"{len(names)} strategies given for {inst.n} agents")
    return names, [make_strategy(nm.strip(), a.valuation, a.entitlement) for nm, a in zip(names, inst.agents)]


def _game(args, default: str):
    from .bidding.engine import run_game

    inst = _load(args.instance)
    if inst.kind != GOODS:
        raise InstanceError("the bidding game needs a goods instance")
    if args.tiebreak == "random" and args.seed is None:
        raise ValueError("--tiebreak random needs --seed")
    names, strats = _strategies(inst, args.strategies, default)
    result = run_game(inst, strats, args.tiebreak, args.seed)
    return inst, names, result


def cmd_allocate_goods(args) -> dict:
    from .shares import tps_hat

    inst, names, result = _game(args, "safe")
    values = result.allocation.values(inst)
    targets = [tps_hat(a.valuation, a.entitlement) / 2 for a in inst.agents]
    out = {"strategies": names, **result.to_json(), "values": values, "half_tps_hat": targets,
           "guarantee_met": all(x >= t for x, t in zip(values, targets))}
    if not out["guarantee_met"]:
        raise VerificationFailed(out)
    return out


def cmd_bid_play(args) -> dict:
    inst, names, result = _game(args, "safe")
    return {"strategies": names, **result.to_json(), "values": result.allocation.values(inst)}


def cmd_bid_solve(args) -> dict:
    from .bidding.solver import solve_two_player

    inst = _load(args.instance)
    a = _agent(inst, args.agent)
    b = to_rational(args.b) if args.b is not None else a.entitlement
    sol = solve_two_player(a.valuation, cap_m=args.cap or 16)
    vf = sol.value_functions[0]
    out = {"agent": args.agent, "b": b, "value": sol.value(b),
           "value_function": [{"above": t, "value": w.value} for t, w in zip(vf.breakpoints, vf.values)]}
    if args.thresholds:
        tv = sol.thresholds
        out["thresholds"] = [{"bundle": sorted(s), "T": t} for s, t in zip(tv.ranks, tv.T)]
        out["threshold_checks_failed"] = tv.check()
    return out


def cmd_assign_chores(args) -> dict:
    from .chores import assign_bobw, assign_rrr
    from .shares import rrr_share

    inst = _load(args.instance)
    if inst.kind != CHORES:
        raise InstanceError("assign-chores needs a chores instance")
    shares = [rrr_share(a.valuation, a.entitlement) for a in inst.agents]
    if not args.bobw:
        alloc = assign_rrr(inst)
        costs = alloc.values(inst)
        return {"allocation": alloc.to_json(), "costs": costs, "rrr_shares": shares}
    ra = assign_bobw(inst)
    out = {
        "outcomes": [{"weight": o.weight, "allocation": o.allocation.to_json(),
                      "coupons": [sorted(c) for c in o.coupons], "costs": o.allocation.values(inst)}
                     for o in ra.outcomes],
        "expected_costs": ra.expected_values(inst),
        "rrr_shares": shares,
    }
    if args.seed is not None:
        chosen = ra.sample(args.seed)
        out["sampled"] = {"seed": args.seed, "allocation": chosen.allocation.to_json(),
                          "costs": chosen.allocation.values(inst)}
    return out


def cmd_exante_goods(args) -> dict:
    from .goods_exante import DEFAULT_N, exante_grand_bundle_lottery, grand_bundle_probabilities
    from .shares import sylvester

    inst = _load(args.instance)
    n_cap = args.n_cap or DEFAULT_N
    probs = grand_bundle_probabilities(inst, n_cap)
    lot = exante_grand_bundle_lottery(inst, n_cap)
    return {
        "gamma": sylvester(n_cap).gamma_lower,
        "lottery": [{"agent": i, "probability": p} for i, p in enumerate(probs)],
        "expected_values": lot.expected_values(inst),
    }


def cmd_verify(args) -> dict:
    from .oracles import DEFAULT_ENUM_CAP, check_feasibility, fixture
    from .shares import share_value

    if args.fixture:
        cert = fixture(args.fixture).certify()
        out = {"fixture": args.fixture, **cert.to_json()}
        if not cert.holds:
            raise VerificationFailed(out)
        return out
    if not (args.share and args.instance):
        raise ValueError("verify needs --fixture NAME or --share KIND INSTANCE")
    inst = _load(args.instance)
    factor = to_rational(args.factor)
    res = check_feasibility(inst, lambda v, b: factor * share_value(args.share, v, b),
                            cap=args.cap or DEFAULT_ENUM_CAP)
    out = {"share": args.share, "factor": factor, **res.to_json()}
    if not res.feasible:
        raise VerificationFailed(out)
    return out


def cmd_fixtures(args) -> dict:
    from .oracles import FIXTURES

    rows = []
    for name in sorted(FIXTURES):
        fx = FIXTURES[name]()
        params = {k: v for k, v in fx.params.items() if k != "valuations"}
        rows.append({"name": name, "params": params, "note": fx.note})
    return {"fixtures": rows}


def build_parser() -> argparse.ArgumentParser:
    from .shares import ShareKind

    p = argparse.ArgumentParser(prog="fairshare", description=__doc__.splitlines()[0])
    p.add_argument("--cap", type=int, default=None, help="override enumeration and solver caps")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("share", help="one agent's share value")
    s.add_argument("--kind", required=True, choices=[k.value for k in ShareKind])
    s.add_argument("--agent", type=int, default=0)
    s.add_argument("--anchor", type=int, default=None, help="anchor agent for --kind personalized")
    s.add_argument("instance")
    s.set_defaults(func=cmd_share)

    s = sub.add_parser("personalized", help="personalized shares of every agent")
    s.add_argument("--anchor", type=int, required=True)
    s.add_argument("instance")
    s.set_defaults(func=cmd_personalized)

    for name, func, help_ in (("allocate-goods", cmd_allocate_goods, "run the bidding game with safe strategies"),
                              ("bid-play", cmd_bid_play, "run the bidding game with chosen strategies")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--strategies", default=None,
                       help="comma-separated: optimal, safe, byv, table, const:X, approx:EPS")
        s.add_argument("--tiebreak", choices=["index", "random"], default="index")
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("instance")
        s.set_defaults(func=func)

    s = sub.add_parser("bid-solve", help="exact two-player solution for one agent")
    s.add_argument("--agent", type=int, default=0)
    s.add_argument("--b", default=None, help="budget fraction (defaults to the entitlement)")
    s.add_argument("--thresholds", action="store_true")
    s.add_argument("instance")
    s.set_defaults(func=cmd_bid_solve)

    s = sub.add_parser("assign-chores", help="rounded round-robin assignment")
    s.add_argument("--bobw", action="store_true", help="randomized assignment over coupon matchings")
    s.add_argument("--seed", type=int, default=None, help="sample one outcome (with --bobw)")
    s.add_argument("instance")
    s.set_defaults(func=cmd_assign_chores)

    s = sub.add_parser("exante-goods", help="grand-bundle lottery")
    s.add_argument("--n-cap", type=int, default=None)
    s.add_argument("instance")
    s.set_defaults(func=cmd_exante_goods)

    s = sub.add_parser("verify", help="check a fixture certificate or a share's feasibility")
    s.add_argument("--fixture", default=None)
    s.add_argument("--share", default=None, choices=[k.value for k in ShareKind])
    s.add_argument("--factor", default="1")
    s.add_argument("instance", nargs="?")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fixtures", help="list the fixture catalog")
    s.set_defaults(func=cmd_fixtures)
    return p


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(_enc(payload), indent=2) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        _emit(args.func(args))
        return EXIT_OK
    except VerificationFailed as exc:
        _emit(exc.payload)
        return EXIT_VERIFY
    except ResourceCapExceeded as exc:
        _emit({"error": "resource cap exceeded", "detail": str(exc)})
        return EXIT_CAP
    except (InstanceError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit({"error": type(exc).__name__, "detail": str(exc)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
