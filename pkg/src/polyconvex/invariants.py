"""Similarity invariants of a pair of real 2x2 matrices ``(A1, A2)`` describing
three planes ``R^2, (A1 + iI) R^2, (A2 + iI) R^2``, and the admissible domain
those criteria are stated on."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .config import Tolerances, resolve
from .kernel import as_matrix, det2


def spectrum(a) -> tuple[complex, complex]:
    """Eigenvalues by the quadratic formula, smaller real part first."""
    a = as_matrix(a)
    tr, det = float(np.trace(a)), float(det2(a))
    root = cmath.sqrt(tr * tr - 4 * det)
    lo, hi = (tr - root) / 2, (tr + root) / 2
    if root.real == 0 and root.imag != 0:
        return (lo, hi) if lo.imag <= hi.imag else (hi, lo)
    return lo, hi


def theta(a1, a2) -> float:
    """``det A1 (Tr A2)^2 + Tr A1A2 (Tr A1A2 - Tr A1 Tr A2)``; not symmetric."""
    a1, a2 = as_matrix(a1), as_matrix(a2)
    t12 = float(np.trace(a1 @ a2))
    return float(det2(a1) * np.trace(a2) ** 2 + t12 * (t12 - np.trace(a1) * np.trace(a2)))


def lambda_invariant(a1, a2) -> float:
    a1, a2 = as_matrix(a1), as_matrix(a2)
    return float(4 * det2(a1 @ a2) - 0.25 * (np.trace(a1) * np.trace(a2)) ** 2)


def beta_invariant(a1, a2) -> float:
    a1, a2 = as_matrix(a1), as_matrix(a2)
    t12 = float(np.trace(a1 @ a2))
    return lambda_invariant(a1, a2) - t12 * (t12 - float(np.trace(a1) * np.trace(a2)))


@dataclass(frozen=True)
class InvariantReport:
    det_a1: float
    det_a2: float
    tr_a1: float
    tr_a2: float
    tr_a1a2: float
    det_a1a2: float
    det_commutator: float
    theta_12: float
    theta_21: float
    lambda_: float
    beta_: float
    spectrum_a1: tuple[complex, complex]
    spectrum_a2: tuple[complex, complex]
    in_omega: bool

    @property
    def a1_real_spectrum(self) -> bool:
        return all(abs(l.imag) == 0 for l in self.spectrum_a1)

    @property
    def a2_real_spectrum(self) -> bool:
        return all(abs(l.imag) == 0 for l in self.spectrum_a2)

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if name.startswith("spectrum"):
                v = [[float(l.real), float(l.imag)] for l in v]
            out[name] = v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "InvariantReport":
        kw = dict(data)
        for name in ("spectrum_a1", "spectrum_a2"):
            kw[name] = tuple(complex(re, im) for re, im in data[name])
        return cls(**kw)


def compute_invariants(a1, a2, tol: Tolerances | None = None) -> InvariantReport:
    tol = resolve(tol)
    a1, a2 = as_matrix(a1), as_matrix(a2)
    d1, d2 = float(det2(a1)), float(det2(a2))
    tr1, tr2 = float(np.trace(a1)), float(np.trace(a2))
    tr12 = float(np.trace(a1 @ a2))
    det12 = d1 * d2
    dc = float(det2(a1 @ a2 - a2 @ a1))
    lam = 4 * det12 - 0.25 * (tr1 * tr2) ** 2
    beta = lam - tr12 * (tr12 - tr1 * tr2)
    th12 = d1 * tr2**2 + tr12 * (tr12 - tr1 * tr2)
    th21 = d2 * tr1**2 + tr12 * (tr12 - tr1 * tr2)
    s1, s2 = spectrum(a1), spectrum(a2)
    in_omega = (
        abs(dc) > tol.commutator
        and abs(s1[0] - s1[1]) > tol.spectral_separation
        and all(abs(l - 1j) > tol.imaginary_unit for l in s1 + s2)
    )
    return InvariantReport(
        det_a1=d1,
        det_a2=d2,
        tr_a1=tr1,
        tr_a2=tr2,
        tr_a1a2=tr12,
        det_a1a2=det12,
        det_commutator=dc,
        theta_12=th12,
        theta_21=th21,
        lambda_=lam,
        beta_=beta,
        spectrum_a1=s1,
        spectrum_a2=s2,
        in_omega=bool(in_omega),
    )


@dataclass(frozen=True)
class BetaIdentityCheck:
    lhs: float
    rhs: float
    beta_exceeds: bool  # beta > det A2 (Tr A1)^2
    q_exceeds: bool  # q^2 > (s1 + s2)^2 / 4

    @property
    def agrees(self) -> bool:
        return abs(self.lhs - self.rhs) <= 1e-10 * max(1.0, abs(self.lhs))


def beta_normalform_identity_check(lambda1: float, lambda2: float, s1: float, s2: float, q: float) -> BetaIdentityCheck:
    """Compare beta of ``(diag(l1, l2), [[s1, q], [q, s2]])`` with its closed form.

    Also reports the two inequalities whose equivalence drives the
    product-separation criterion. They agree whenever ``l1 != l2``, since
    ``beta - det A2 (Tr A1)^2 = (l1 - l2)^2 (q^2 - (s1 + s2)^2 / 4)``.
    """
    a1 = np.diag([lambda1, lambda2]).astype(float)
    a2 = np.array([[s1, q], [q, s2]], dtype=float)
    lhs = beta_invariant(a1, a2)
    rhs = 4 * lambda1 * lambda2 * (s1 * s2 - q * q) - 0.25 * (lambda1 - lambda2) ** 2 * (s1 - s2) ** 2
    bound = float(det2(a2) * np.trace(a1) ** 2)
    return BetaIdentityCheck(
        lhs=lhs,
        rhs=rhs,
        beta_exceeds=lhs > bound,
        q_exceeds=q * q > (s1 + s2) ** 2 / 4,
    )
