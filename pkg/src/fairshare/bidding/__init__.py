"""The bidding game: exact two-player solver, engine, strategies and adversary search."""
from .adversary import AdversaryResult, exhaustive_adversary_value
from .engine import GameResult, IllegalMove, Move, Round, Strategy, View, run_game, tiebreak_order
from .solver import (StepFunction, ThresholdVector, TwoPlayerSolution, TwoPlayerSolver,
                     solve_counts, solve_two_player)
from .strategies import (ApproxOptimalStrategy, BidYourValueStrategy, ConstantStrategy, K2TableStrategy,
                         LargeKStrategy, OptimalStrategy, SafeStrategy, ScheduleStrategy,
                         approx_optimal_strategy, bid_your_value_strategy, k2_table_strategy,
                         make_strategy, optimal_strategy, safe_strategy)

__all__ = [
    "AdversaryResult", "exhaustive_adversary_value", "GameResult", "IllegalMove", "Move", "Round",
    "Strategy", "View", "run_game", "tiebreak_order", "StepFunction", "ThresholdVector",
    "TwoPlayerSolution", "TwoPlayerSolver", "solve_counts", "solve_two_player",
    "ApproxOptimalStrategy", "BidYourValueStrategy", "ConstantStrategy", "K2TableStrategy",
    "LargeKStrategy", "OptimalStrategy", "SafeStrategy", "ScheduleStrategy",
    "approx_optimal_strategy", "bid_your_value_strategy", "k2_table_strategy", "make_strategy",
    "optimal_strategy", "safe_strategy",
]
