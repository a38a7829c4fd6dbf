"""Central tolerance record.

Every public operation takes an optional ``tol`` argument; ``None`` means
:data:`DEFAULT`. Use :func:`dataclasses.replace` to override single entries::

    tol = dataclasses.replace(DEFAULT, cluster_radius=1e-7)
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # kernel
    cluster_radius: float = 1e-6
    derivative_vanish: float = 1e-6  # relative to the coefficient norm
    root_max_iter: int = 200
    max_root_degree: int = 8
    origin_guard: float = 1e-12

    # planes
    totally_real: float = 1e-10
    transverse: float = 1e-10
    factor_rel: float = 1e-9
    leading_min: float = 1e-12
    discriminant: float = 1e-10

    # invariants / domain membership
    commutator: float = 1e-10
    spectral_separation: float = 1e-8
    imaginary_unit: float = 1e-8

    # decision procedures
    weinstock: float = 1e-9
    strict: float = 1e-12
    band: float = 1e-12

    # analysis
    root_circle: float = 1e-6
    subharmonic: float = 1e-9
    arc: float = 1e-9
    newton_residual: float = 1e-12
    jacobian_singular: float = 1e-10
    circle_filter: float = 1e-8
    fd_relative: float = 1e-4
    fd_step: float = 1e-4  # times the radius

    # certificates
    kallin_violation: float = 1e-9
    kallin_zero: float = 1e-9
    zero_fiber: float = 1e-6

    seed: int = 42


DEFAULT = Tolerances()


def resolve(tol: Tolerances | None) -> Tolerances:
    return DEFAULT if tol is None else tol
