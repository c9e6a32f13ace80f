"""Constructive comparison on tori and finite windows of Z^d and the Heisenberg group.

Banach densities with exact rationals, (quasi)tilings, the correction-chain
injection builder, block codes with subequivalence certificates, and the
conversions between quasitilings and tilings.
"""

from .correction import (Chain, InjectionResult, PartialInjection, build_injection, chain_bound,
                         compute_chain_bound_N, correct_along, correct_simultaneously, find_chains,
                         greedy_initial, minimal_chains, name_of, run_corrections, splice_shorter,
                         validate_chain, verify_key_hypothesis)
from .density import (MARGIN, TORUS_EXACT, Window, banach_density, check_inequality, density_advantage,
                       invariance_defect, limit_density, lower_density, upper_density)
from .dyntile import (TargetChoice, default_targets, injection_from_tiling, interval_targets,
                      tiling_from_quasitiling)
from .errors import (BoundaryInconclusive, BudgetExceeded, ComparisonError, ContextMismatch,
                     PreconditionError, TheoremViolation)
from .group import FinSet, GroupCtx, ball, box, interval, power_growth, set_op, stabilization_point
from .oracle import MatchInstance, brute_chain_check, hall_deficiency, max_matching
from .symbolic import (BlockCode, Configuration, SubeqCertificate, build_code_table, certificate_from_code,
                       encode, extract_sets, minimal_horizon, tiled_configuration, verify_certificate)
from .tiling import Quasitiling, build_tiling, check_property, saturation, shape_union_E

__version__ = "0.1.0"
