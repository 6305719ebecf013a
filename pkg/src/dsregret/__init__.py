"""Regret minimization for discounted-sum games on weighted graphs.

The library computes exact (rational) regret values of a protagonist
who fixes a strategy and is then compared against the best response in
hindsight, for three adversary classes: unrestricted strategies,
positional strategies, and word adversaries on nondeterministic
weighted automata.  Everything is exact Fraction arithmetic; floats
appear only in advisory decimal renderings.
"""

from .arena import (
    FormatError,
    LassoPlay,
    PlayPrefix,
    WeightedArena,
    WeightedAutomaton,
    format_arena,
    format_automaton,
    parse_arena,
    parse_automaton,
)
from .rational import format_rational, parse_rational
from .regret_all import (
    BudgetExceeded,
    RegretReport,
    ZeroRegretAll,
    bad_edges,
    horizon_for_gap,
    local_regret,
    prefix_regret,
    regret_all,
    regret_lower_bound,
    regret_threshold_all,
    zero_regret_all,
)
from .regret_positional import (
    PositionalRegretReport,
    ZeroRegretPositional,
    allowed_edges,
    horizon_nu,
    lower_bound_b,
    mrp_mrs,
    oracle_interval_positional,
    regret_positional,
    zero_regret_positional,
)
from .regret_word import (
    EpsilonGapReport,
    ResolutionStrategy,
    epsilon_gap,
    gap_horizon,
    oracle_interval_word,
    resolution_from_json,
    strategy_regret_word,
    zero_regret_word,
)
from .reductions import (
    Digraph,
    GeneratedInstance,
    aval_gadget,
    gen_2dp,
    gen_sat,
    has_disjoint_paths,
    parse_cnf,
    parse_digraph,
    satisfiable,
)
from .strategies import (
    OTPStrategy,
    SwitchStrategy,
    eval_strategy_regret,
    strategy_from_json,
    strategy_to_json,
    synth_otp,
)
from .values import (
    CanonicalStrategies,
    CoopTable,
    PositionalStrategy,
    ValueTable,
    antag_value,
    canonical_strategies,
    coop_table,
    coop_value,
    coop_value_excluding,
    discounted_sum,
    follow_profile,
    loop_value,
    value_table,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CanonicalStrategies",
    "CoopTable",
    "Digraph",
    "EpsilonGapReport",
    "FormatError",
    "GeneratedInstance",
    "LassoPlay",
    "OTPStrategy",
    "PlayPrefix",
    "PositionalRegretReport",
    "PositionalStrategy",
    "RegretReport",
    "ResolutionStrategy",
    "SwitchStrategy",
    "ValueTable",
    "WeightedArena",
    "WeightedAutomaton",
    "ZeroRegretAll",
    "ZeroRegretPositional",
    "allowed_edges",
    "antag_value",
    "aval_gadget",
    "bad_edges",
    "canonical_strategies",
    "coop_table",
    "coop_value",
    "coop_value_excluding",
    "discounted_sum",
    "epsilon_gap",
    "eval_strategy_regret",
    "follow_profile",
    "format_arena",
    "format_automaton",
    "format_rational",
    "gap_horizon",
    "gen_2dp",
    "gen_sat",
    "has_disjoint_paths",
    "horizon_for_gap",
    "horizon_nu",
    "local_regret",
    "loop_value",
    "lower_bound_b",
    "mrp_mrs",
    "oracle_interval_positional",
    "oracle_interval_word",
    "parse_arena",
    "parse_automaton",
    "parse_cnf",
    "parse_digraph",
    "parse_rational",
    "prefix_regret",
    "regret_all",
    "regret_lower_bound",
    "regret_positional",
    "regret_threshold_all",
    "resolution_from_json",
    "satisfiable",
    "strategy_from_json",
    "strategy_regret_word",
    "strategy_to_json",
    "synth_otp",
    "value_table",
    "zero_regret_all",
    "zero_regret_positional",
    "zero_regret_word",
]
