"""Certified suprema and discriminant tests for sparse fewnomials on the positive orthant."""

from .core import (
    ClassMembership,
    ConditionReport,
    Fewnomial,
    classify,
    evaluate,
    log_condition_number,
    make_fewnomial,
)
from .discriminant import (
    CircuitData,
    CircuitKind,
    MembershipReport,
    classify_circuit,
    discriminant_log_form,
    discriminant_membership,
)
from .errors import *  # noqa: F401,F403
from .expr import parse_scalar
from .linalg import BVector, b_vector, determinant, rank
from .precision import (
    CertifiedValue,
    Interval,
    PrecisionBudget,
    Sign,
    certified_sign,
    log_linear_form,
    power,
)
from .supremum import (
    Decision,
    MaximizerDescription,
    Outcome,
    SupCase,
    SupremumResult,
    UnboundedWitness,
    solve_binomial_system,
    solve_lambda_star,
    sup_circuit,
    sup_decide,
    sup_simplex,
    sup_tetranomial,
    supremum,
)
from .transform import CanonicalSimplexForm, MonomialMap, apply_monomial_map, canonicalize_simplex, monomial_map
from .univariate import Root, RootReport, root_bound, trinomial_roots

__version__ = "0.1.0"
