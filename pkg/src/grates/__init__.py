"""Certified g-entropy computations for rank-one cutting-and-stacking systems."""

from .certified import CertifiedValue
from .entropy_functions import (ETA, GIR, HIR, HLOG, EntropyFunction, HFunction, catalog, classify,
                                eval_at, h_piece_index, jensen_bound, parse_function_spec, phi_of,
                                property_check, sampled_h_criterion)
from .geometry import (IntervalSet, LabeledPartition, PiecewiseTranslation, join, map_set,
                       restricted_entropy, set_algebra, static_entropy)
from .orbit_entropy import (EntropySeries, SubshiftSpec, cylinder_measures, entropy_of_names,
                            entropy_series, join_sequence_geometric, name_measures_symbolic,
                            subshift_complexity)
from .rank_one import AlignedSet, GrowthAssumption, PrimeSeq, RankOneSystem, build, validate_primes
from .rates import (Reindexer, SequenceSpec, d_xi0, fact59_check, lambda_E, lemma58_bound,
                    nonisomorphism_report, rate_report, reindex, seq_eval, theorem54_check)
from .words import NameMultiset, factor_multiset, period, period_range_measure

__version__ = "0.1.0"
