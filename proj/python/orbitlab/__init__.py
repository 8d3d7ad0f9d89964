"""Numerical verification toolkit for torus-invariant Kahler potentials.

The heavy lifting lives in the C++ extension module; this package just
re-exports its public surface.
"""

from ._core import (  # noqa: F401
    ConfigError,
    ConjugateResult,
    DensityField,
    DerivativeBundle,
    DerivativeMode,
    DomainError,
    Grid1D,
    NewtonOptions,
    OrbitlabError,
    TorusPotential,
    WeightFunction,
    average_density,
    check_normalization,
    conditional_density,
    conditional_field,
    conjugate_at,
    conjugate_w_hessian,
    det,
    dh_pushforward,
    discrete_llt,
    discrete_ot_oracle,
    grad_p_conjugate,
    ma_density,
    make_projective_model,
    make_quadratic_separable,
    make_toric_fs,
    minor_expansion_crosscheck,
    mixed_hessian_det,
    momentum_map,
    multi_minor,
    perm_minor_sum,
    reconstruct_potential,
    reduced_form,
    run_suites,
    verify_factorization,
    verify_minor_identity,
    verify_minor_identity_exact,
    verify_momentum_is_transport,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
