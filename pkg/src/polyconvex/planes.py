"""Totally-real planes in C^2: representations, Weinstock reduction,
simultaneous normal forms, cubic preimage factorization and branch lifts.

A plane is stored as a complex 2x2 matrix whose *columns* span it over R,
so the plane is ``{basis @ x : x in R^2}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import Tolerances, resolve
from .errors import (
    BranchUndefined,
    CommutatorNotPositive,
    EigenvalueDegenerate,
    InvalidParameter,
    NotFactorable,
    NotTotallyReal,
    NotTransverse,
)
from .kernel import as_complex, as_matrix, det2, principal_cbrt

SQRT3 = math.sqrt(3.0)
OMEGA = cmath.exp(2j * math.pi / 3)


def _realify(basis: np.ndarray) -> np.ndarray:
    """4x2 real matrix: rows (Re z, Im z, Re w, Im w) of each spanning column."""
    return np.vstack([basis[0].real, basis[0].imag, basis[1].real, basis[1].imag])


@dataclass(frozen=True, eq=False)
class TotallyRealPlane:
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.shape != (2, 2) or not np.all(np.isfinite(b)):
            raise InvalidParameter("plane basis must be a finite complex 2x2 array (columns span the plane)")
        object.__setattr__(self, "basis", b)

    @classmethod
    def from_graph(cls, alpha, beta, tol: Tolerances | None = None) -> "TotallyRealPlane":
        """The plane ``w = alpha z + beta conj(z)``."""
        alpha, beta = as_complex(alpha), as_complex(beta)
        plane = cls(np.array([[1, 1j], [alpha + beta, 1j * (alpha - beta)]]))
        plane.check_totally_real(tol)
        return plane

    @classmethod
    def from_vectors(cls, v1, v2, tol: Tolerances | None = None) -> "TotallyRealPlane":
        plane = cls(np.column_stack([np.asarray(v1, dtype=complex), np.asarray(v2, dtype=complex)]))
        plane.check_totally_real(tol)
        return plane

    def complex_det_ratio(self) -> float:
        """|det| of the basis over the product of column norms (0 for a complex line)."""
        norms = np.linalg.norm(self.basis, axis=0)
        if np.any(norms == 0):
            return 0.0
        return float(abs(det2(self.basis)) / (norms[0] * norms[1]))

    def is_totally_real(self, tol: Tolerances | None = None) -> bool:
        return self.complex_det_ratio() > resolve(tol).totally_real

    def check_totally_real(self, tol: Tolerances | None = None) -> None:
        if not self.is_totally_real(tol):
            raise NotTotallyReal("spanning vectors are C-linearly dependent", det_ratio=self.complex_det_ratio())

    def graph_coefficients(self) -> tuple[complex, complex]:
        """``(alpha, beta)`` with the plane equal to ``w = alpha z + beta conj(z)``."""
        z1, z2 = self.basis[0]
        w1, w2 = self.basis[1]
        m = np.array([[z1, np.conj(z1)], [z2, np.conj(z2)]])
        if abs(det2(m)) <= 1e-12 * max(abs(z1) * abs(z2), 1e-300):
            raise InvalidParameter("plane is not a graph over the z-axis")
        alpha, beta = np.linalg.solve(m, np.array([w1, w2]))
        return complex(alpha), complex(beta)

    def point(self, x) -> np.ndarray:
        """Points ``basis @ x`` for real parameters ``x`` of shape (2,) or (2, N)."""
        return self.basis @ np.asarray(x, dtype=float)

    def realified(self) -> np.ndarray:
        return _realify(self.basis)

    def distance(self, other: "TotallyRealPlane") -> float:
        """Spectral-norm distance between the orthogonal projectors in R^4."""
        q1, _ = np.linalg.qr(self.realified())
        q2, _ = np.linalg.qr(other.realified())
        return float(np.linalg.norm(q1 @ q1.T - q2 @ q2.T, 2))

    def to_dict(self) -> dict:
        try:
            alpha, beta = self.graph_coefficients()
        except InvalidParameter:
            return {"basis": [[v[0].real, v[0].imag, v[1].real, v[1].imag] for v in self.basis.T]}
        return {"alpha": [alpha.real, alpha.imag], "beta": [beta.real, beta.imag]}

    @classmethod
    def from_dict(cls, data: dict, tol: Tolerances | None = None) -> "TotallyRealPlane":
        if "basis" in data:
            v1, v2 = ([complex(v[0], v[1]), complex(v[2], v[3])] for v in data["basis"])
            return cls.from_vectors(v1, v2, tol=tol)
        if "alpha" in data and "beta" in data:
            return cls.from_graph(complex(*data["alpha"]), complex(*data["beta"]), tol=tol)
        raise InvalidParameter("plane JSON needs 'alpha'/'beta' or 'basis'")


def normalizing_map(p0: TotallyRealPlane, tol: Tolerances | None = None) -> np.ndarray:
    """C-linear map sending ``p0`` onto R^2 (its spanning columns to e1, e2)."""
    p0.check_totally_real(tol)
    return np.linalg.inv(p0.basis)


def weinstock_matrix(image_basis: np.ndarray, tol: Tolerances | None = None) -> np.ndarray:
    """``A`` with ``span_R(image_basis) = (A + iI) R^2``."""
    tol = resolve(tol)
    re, im = image_basis.real, image_basis.imag
    norms = np.linalg.norm(image_basis, axis=0)
    if abs(det2(im)) <= tol.transverse * norms[0] * norms[1]:
        raise NotTransverse("plane meets R^2 in a nonzero vector", det_imag=float(det2(im)))
    return re @ np.linalg.inv(im)


def weinstock_normal_form(
    p0: TotallyRealPlane, others: Sequence[TotallyRealPlane], tol: Tolerances | None = None
) -> list[np.ndarray]:
    """Real matrices ``A_j`` such that, after the map from :func:`normalizing_map`,
    ``p0`` becomes R^2 and each ``others[j]`` becomes ``(A_j + iI) R^2``."""
    L = normalizing_map(p0, tol)
    out = []
    for plane in others:
        plane.check_totally_real(tol)
        out.append(weinstock_matrix(L @ plane.basis, tol))
    return out


def plane_from_matrix(a, p0: TotallyRealPlane | None = None) -> TotallyRealPlane:
    """``(A + iI) R^2``, pulled back through ``p0``'s normalizing map when given."""
    basis = as_matrix(a) + 1j * np.eye(2)
    if p0 is not None:
        basis = p0.basis @ basis
    return TotallyRealPlane(basis)


def pairwise_reduction(a1, a2, tol: Tolerances | None = None) -> np.ndarray:
    """Weinstock matrix ``(A1 A2 + I)(A1 - A2)^{-1}`` of the pair ``(P1, P2)``
    once ``P1`` is moved onto R^2 by ``z -> (A1 - iI) z``."""
    tol = resolve(tol)
    a1, a2 = as_matrix(a1), as_matrix(a2)
    diff = a1 - a2
    if abs(det2(diff)) < tol.transverse:
        raise NotTransverse("A1 - A2 is singular", det=float(det2(diff)))
    return (a1 @ a2 + np.eye(2)) @ np.linalg.inv(diff)


def commutator_det(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    return float(det2(a @ b - b @ a))


def _eigenvector(a: np.ndarray, lam: float) -> np.ndarray:
    v1 = np.array([a[0, 1], lam - a[0, 0]])
    v2 = np.array([lam - a[1, 1], a[1, 0]])
    v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    v = v / np.linalg.norm(v)
    # sign fixed so the dominant component is positive
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def simultaneous_normal_form(a, b, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Real ``T`` with ``T a T^-1`` diagonal (eigenvalues ascending) and
    ``T b T^-1`` having equal off-diagonal entries.

    Returns ``(T a T^-1, T b T^-1, T)``.
    """
    tol = resolve(tol)
    a, b = as_matrix(a), as_matrix(b)
    tr, det = np.trace(a), det2(a)
    disc = tr * tr - 4 * det
    if disc <= tol.discriminant:
        raise EigenvalueDegenerate("first matrix lacks two distinct real eigenvalues", discriminant=float(disc))
    dc = commutator_det(a, b)
    if dc <= tol.commutator:
        raise CommutatorNotPositive("det[a, b] is not positive", det_commutator=dc)
    root = math.sqrt(disc)
    lams = ((tr - root) / 2, (tr + root) / 2)
    S = np.column_stack([_eigenvector(a, lam) for lam in lams])
    T = np.linalg.inv(S)
    bp = T @ b @ S
    d = math.sqrt(bp[1, 0] / bp[0, 1])
    T = np.diag([d, 1.0]) @ T
    Tinv = np.linalg.inv(T)
    da = T @ a @ Tinv
    sb = T @ b @ Tinv
    da[0, 1] = da[1, 0] = 0.0
    return da, sb, T


@dataclass(frozen=True)
class CubicCoefficients:
    """Coefficients of ``a1 z^2 zb + a2 z zb^2 + a3 zb^3``."""

    a1: complex
    a2: complex
    a3: complex

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            object.__setattr__(self, name, as_complex(getattr(self, name)))

    @classmethod
    def family(cls, t: float) -> "CubicCoefficients":
        return cls(1.0, t, t * t / 3.0)

    def holomorphic_extension(self, z, w):
        """``a3 w^3 + a2 z w^2 + a1 z^2 w``; equals the cubic when ``w = conj(z)``."""
        return self.a3 * w**3 + self.a2 * z * w**2 + self.a1 * z**2 * w

    def factor_residual(self) -> float:
        return abs(self.a2**2 - 3 * self.a1 * self.a3)


def factor_cubic_preimage(c: CubicCoefficients, tol: Tolerances | None = None) -> list[TotallyRealPlane]:
    """The three planes whose union is ``{(z, w): p(z, w) = p(z, conj z)}``.

    Exists when ``a2^2 = 3 a1 a3`` and ``a3 != 0``; the first plane is always
    ``w = conj(z)``.
    """
    tol = resolve(tol)
    resid = c.factor_residual()
    scale = max(abs(c.a2) ** 2, abs(c.a1 * c.a3), 1.0)
    if abs(c.a3) <= tol.leading_min or resid > tol.factor_rel * scale:
        raise NotFactorable(resid)
    ratio = c.a2 / c.a3
    planes = [TotallyRealPlane.from_graph(0, 1, tol)]
    for sign in (1, -1):
        alpha = -(1 / SQRT3) * cmath.exp(-sign * 1j * math.pi / 6) * ratio
        beta = cmath.exp(sign * 2j * math.pi / 3)
        planes.append(TotallyRealPlane.from_graph(alpha, beta, tol))
    return planes


def verify_pullback(
    c: CubicCoefficients, planes: Sequence[TotallyRealPlane], samples: int = 200, seed: int | None = None
) -> float:
    """Largest ``|p(z, w) - p(z, conj z)|`` over random points of the planes with ``|z| <= 1``."""
    rng = np.random.default_rng(resolve(None).seed if seed is None else seed)
    worst = 0.0
    for plane in planes:
        r = np.sqrt(rng.uniform(0, 1, samples))
        th = rng.uniform(0, 2 * np.pi, samples)
        try:
            alpha, beta = plane.graph_coefficients()
            z = r * np.exp(1j * th)
            w = alpha * z + beta * np.conj(z)
        except InvalidParameter:
            pts = plane.point(np.vstack([r * np.cos(th), r * np.sin(th)]))
            z, w = pts[0], pts[1]
        diff = c.holomorphic_extension(z, w) - c.holomorphic_extension(z, np.conj(z))
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def branch_lift(t: float, branch: int, F: Callable[[complex], complex], zeta) -> complex:
    """Correction term of the lifted surface over the ``branch``-th plane.

    With ``u = zeta + t conj(zeta)`` and ``omega = exp(2 pi i branch / 3)``,
    solves ``(t f + omega u)^3 = u^3 + 3 t F(zeta)`` as
    ``t f = omega u ((1 + 3tF/u^3)^(1/3) - 1)`` with the principal cube root,
    so the correction vanishes with ``F``.
    """
    t = float(t)
    if not (t > 0 and t != 1 and math.isfinite(t)):
        raise InvalidParameter("t must lie in (0, 1) or (1, inf)")
    if branch not in (0, 1, 2):
        raise InvalidParameter("branch must be 0, 1 or 2")
    zeta = as_complex(zeta)
    if zeta == 0:
        raise BranchUndefined("zeta must be nonzero")
    u = zeta + t * zeta.conjugate()
    if abs(u) < 1e-300:
        raise BranchUndefined("zeta + t conj(zeta) vanishes")
    ratio = 3 * t * complex(F(zeta)) / u**3
    if not abs(ratio) < 1:
        raise BranchUndefined("perturbation too large for the principal cube root", ratio=abs(ratio))
    return OMEGA**branch * u * (principal_cbrt(1 + ratio) - 1) / t


def lifted_point(t: float, branch: int, F: Callable[[complex], complex], zeta) -> tuple[complex, complex]:
    """Point ``(zeta, w)`` of the preimage of the perturbed surface over the given branch."""
    planes = factor_cubic_preimage(CubicCoefficients.family(t))
    alpha, beta = planes[branch].graph_coefficients()
    zeta = as_complex(zeta)
    w = alpha * zeta + beta * zeta.conjugate() + branch_lift(t, branch, F, zeta)
    return zeta, w


def family_planes(t: float) -> list[TotallyRealPlane]:
    """The three planes ``w = conj z`` and ``w = alpha_pm z + e^{pm 2 pi i/3} conj z``
    whose union is the preimage of the cubic surface with parameter ``t``."""
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise InvalidParameter("t must be a positive real", t=t)
    return factor_cubic_preimage(CubicCoefficients.family(t))


def family_matrices(t: float, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Weinstock matrices ``(A1, A2)`` of :func:`family_planes` relative to ``w = conj z``.

    Undefined at ``t = 1``, where the planes meet ``w = conj z`` in a line.
    """
    p0, p1, p2 = family_planes(t)
    a1, a2 = weinstock_normal_form(p0, [p1, p2], tol)
    return a1, a2
