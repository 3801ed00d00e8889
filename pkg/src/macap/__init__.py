"""Sum capacity of multiple access channels and nonlocal-game MAC analytics."""
from .capacity import (InnerSolveReport, SumCapacityReport, inner_capacity,
                       relaxed_sum_capacity, sum_capacity, sum_capacity_d2_binary,
                       sum_capacity_general)
from .entropy import (EffectiveChannel, Mac, Modulus, beta_I_modulus, effective_channel,
                      h_n_max, modified_binary_entropy, mutual_information, shannon_entropy)
from .errors import (ConvergenceError, DomainError, EvaluationError, MacapError, ParseError,
                     RefusalError, ValidationError)
from .games import (QUANTUM_VALUES, Correlation, NonlocalGame, PostProcessing, WinningVector,
                    assistance_channel, assisted_mac, build_game_mac, chsh,
                    classical_winning_prob, correlation_bound, deterministic_max_mi,
                    deterministic_optimizer, full_communication_winning_prob,
                    istar_positive_w, istar_stationary_point, keep_answers, magic_square, mi_given_winning_vector,
                    multiparty_parity, passthrough, pr_box, promise_free_winning_prob,
                    signalling, strategy_winning_vector, trivial_correlation)
from .lipschitz import (ExtensionSpec, HypercubeCurve, OptimizationOutcome, SimplexCurve,
                        SimplexGrid, curve_point, extend, grid_point, largest_step,
                        maximize_1d, maximize_compact_convex, maximize_dense_curve,
                        maximize_grid)
from .nslp import build_ns_system, max_ns_winning_prob, ns_winning_vector, simplex_maximize

__version__ = "0.1.0"
