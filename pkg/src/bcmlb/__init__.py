"""Balancing circuit model simulations for indivisible real-valued loads."""

__version__ = "0.1.0"

from .binpack import (Ball, BinState, DiscrepancyTrace, brute_force_optimal, discrepancy,
                      gm_lower_bound, greedy_place, sorted_greedy_place, verify_delta_g)
from .errors import (BCMError, ConfigError, InvalidParameterError, NonErgodicError,
                     SizeLimitError, UndefinedMeritError)
from .metrics import MetricsRecord, aggregate, figure_of_merit, relative_merit
from .network import (MatchingSchedule, NetworkGraph, RoundMatrix, color_edges,
                      generate_connected_graph, matching_matrix, round_matrix)
from .protocol import (Algorithm, Load, Mobility, NetworkState, assign_mobility,
                       balance_matching, continuous_step, deviation, run_dlb)
