"""Numeric foundations: polynomials in z and conj(z), Laurent term maps,
simultaneous root finding with multiplicities, and discrete winding numbers.

Complex scalars are plain Python/numpy ``complex`` values and real 2x2
matrices are ``numpy`` arrays of shape ``(2, 2)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from .config import Tolerances, resolve
from .errors import CurveThroughOrigin, DegenerateInput, InvalidParameter, UndersampledCurve

Exponent = tuple[int, int]


def as_complex(z) -> complex:
    """Coerce to ``complex``, rejecting NaN and infinities."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidParameter(f"non-finite complex scalar {z!r}")
    return z


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite real 2x2 float array (a copy)."""
    m = np.array(a, dtype=float)
    if m.shape != (2, 2):
        raise InvalidParameter(f"expected a 2x2 real matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidParameter("matrix has non-finite entries")
    return m


def det2(a):
    """Determinant of a 2x2 array by the cofactor formula (real or complex)."""
    return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]


def _clean_terms(terms: Mapping[Exponent, complex], allow_negative: bool) -> dict[Exponent, complex]:
    out: dict[Exponent, complex] = {}
    for key, c in terms.items():
        m, n = (int(key[0]), int(key[1]))
        if not allow_negative and (m < 0 or n < 0):
            raise InvalidParameter(f"negative exponent ({m}, {n}) in a polynomial")
        c = as_complex(c)
        if c != 0:
            out[(m, n)] = out.get((m, n), 0) + c
    return {k: v for k, v in out.items() if v != 0}


@dataclass(frozen=True)
class HermitianPoly:
    """Polynomial ``sum c[m, n] z**m conj(z)**n``.

    ``degree`` defaults to the largest total degree present. A polynomial is
    homogeneous when every nonzero term has total degree equal to ``degree``.
    """

    terms: Mapping[Exponent, complex]
    degree: int | None = None

    def __post_init__(self):
        terms = _clean_terms(self.terms, allow_negative=False)
        top = max((m + n for m, n in terms), default=0)
        degree = top if self.degree is None else int(self.degree)
        if degree < top:
            raise InvalidParameter(f"term of total degree {top} exceeds declared degree {degree}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "degree", degree)

    @property
    def homogeneous(self) -> bool:
        return all(m + n == self.degree for m, n in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: "HermitianPoly") -> "HermitianPoly":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return HermitianPoly(terms, max(self.degree, other.degree))

    def __sub__(self, other: "HermitianPoly") -> "HermitianPoly":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "HermitianPoly":
        s = as_complex(scalar)
        return HermitianPoly({k: s * c for k, c in self.terms.items()}, self.degree)

    def __neg__(self) -> "HermitianPoly":
        return (-1.0) * self

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "terms": [[m, n, c.real, c.imag] for (m, n), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "HermitianPoly":
        terms = {(int(m), int(n)): complex(re, im) for m, n, re, im in data["terms"]}
        return cls(terms, data.get("degree"))


def cubic_normal_form(t: float) -> HermitianPoly:
    """The cubic ``z^2 zb + t z zb^2 + (t^2/3) zb^3``."""
    t = float(t)
    return HermitianPoly({(2, 1): 1.0, (1, 2): t, (0, 3): t * t / 3.0}, degree=3)


def evaluate(p: HermitianPoly, z):
    """Evaluate ``p(z, conj(z))``; ``z`` may be a scalar or an array."""
    arr = np.asarray(z, dtype=complex)
    zb = np.conj(arr)
    out = np.zeros_like(arr)
    for (m, n), c in p.terms.items():
        out = out + c * arr**m * zb**n
    return complex(out) if out.ndim == 0 else out


def wirtinger_dbar(p: HermitianPoly) -> HermitianPoly:
    """Derivative with respect to conj(z): ``c z^m zb^n -> n c z^m zb^(n-1)``."""
    terms = {(m, n - 1): n * c for (m, n), c in p.terms.items() if n > 0}
    return HermitianPoly(terms, max(p.degree - 1, 0))


def wirtinger_d(p: HermitianPoly) -> HermitianPoly:
    terms = {(m - 1, n): m * c for (m, n), c in p.terms.items() if m > 0}
    return HermitianPoly(terms, max(p.degree - 1, 0))


@dataclass(frozen=True)
class LaurentExpr:
    """Finite sum ``sum c[m, n] z**m conj(z)**n`` with integer (possibly negative) exponents."""

    terms: Mapping[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean_terms(self.terms, allow_negative=True))

    @classmethod
    def from_poly(cls, p: HermitianPoly) -> "LaurentExpr":
        return cls(dict(p.terms))

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        if np.any(arr == 0) and any(m < 0 or n < 0 for m, n in self.terms):
            raise InvalidParameter("Laurent expression evaluated at the origin")
        zb = np.conj(arr)
        out = np.zeros_like(arr)
        for (m, n), c in self.terms.items():
            out = out + c * arr**m * zb**n
        return complex(out) if out.ndim == 0 else out

    def __add__(self, other: "LaurentExpr") -> "LaurentExpr":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return LaurentExpr(terms)

    def scale(self, s) -> "LaurentExpr":
        s = as_complex(s)
        return LaurentExpr({k: s * c for k, c in self.terms.items()})

    def shift(self, dm: int, dn: int) -> "LaurentExpr":
        """Multiply by ``z**dm * conj(z)**dn``."""
        return LaurentExpr({(m + dm, n + dn): c for (m, n), c in self.terms.items()})

    def conjugate(self) -> "LaurentExpr":
        return LaurentExpr({(n, m): c.conjugate() for (m, n), c in self.terms.items()})

    def mixed_derivative(self) -> "LaurentExpr":
        """``d^2/dz dzb`` term by term: ``c z^m zb^n -> c m n z^(m-1) zb^(n-1)``."""
        return LaurentExpr({(m - 1, n - 1): c * m * n for (m, n), c in self.terms.items() if m * n != 0})

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class RootSet:
    roots: list[tuple[complex, int]]
    residual: float

    @property
    def total_multiplicity(self) -> int:
        return sum(mu for _, mu in self.roots)

    def locations(self) -> list[complex]:
        return [z for z, _ in self.roots]

    def count_inside(self, radius: float = 1.0) -> int:
        """Multiplicity-weighted count of roots with modulus below ``radius``."""
        return sum(mu for z, mu in self.roots if abs(z) < radius)


def _trim(coeffs: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if scale == 0:
        raise DegenerateInput("polynomial is identically zero")
    n = coeffs.size - 1
    while n > 0 and abs(coeffs[n]) <= 1e-14 * scale:
        n -= 1
    return coeffs[: n + 1]


def _aberth(c: np.ndarray, max_iter: int) -> np.ndarray:
    n = c.size - 1
    dc = npoly.polyder(c)
    radius = abs(c[0] / c[-1]) ** (1.0 / n)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    for _ in range(max_iter):
        pz = npoly.polyval(z, c)
        dpz = npoly.polyval(z, dc)
        dpz = np.where(dpz == 0, 1e-300, dpz)
        ratio = pz / dpz
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        w = ratio / (1.0 - ratio * inv.sum(axis=1))
        z = z - w
        if np.all(np.abs(w) <= 4 * np.finfo(float).eps * (1 + np.abs(z))):
            break
    return z


def _clusters(z: np.ndarray, radius: float) -> list[list[int]]:
    parent = list(range(z.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(z.size):
        for j in range(i + 1, z.size):
            if abs(z[i] - z[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(z.size):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish(c: np.ndarray, z0: complex, mu: int) -> complex:
    # Newton on the (mu-1)-th derivative, where a root of multiplicity mu is simple.
    d = npoly.polyder(c, mu - 1) if mu > 1 else c
    dd = npoly.polyder(d)
    z = z0
    for _ in range(8):
        f = npoly.polyval(z, d)
        g = npoly.polyval(z, dd)
        if g == 0:
            break
        step = f / g
        z = z - step
        if abs(step) <= 4 * np.finfo(float).eps * (1 + abs(z)):
            break
    if abs(npoly.polyval(z, c)) <= abs(npoly.polyval(z0, c)) or abs(z - z0) < 1e-9:
        return complex(z)
    return complex(z0)


def find_roots(coeffs: Iterable, tol: Tolerances | None = None) -> RootSet:
    """Roots of ``sum coeffs[k] z**k`` (ascending order) with multiplicities.

    Exactly vanishing low-order coefficients are deflated as a root at 0.
    Remaining roots come from an Aberth-Ehrlich iteration; approximations
    closer than ``tol.cluster_radius`` are merged and the merge is accepted
    only if the derivatives up to order ``mu - 1`` vanish at the cluster centre.
    """
    tol = resolve(tol)
    c = np.array(list(coeffs), dtype=complex)
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise DegenerateInput("empty or non-finite coefficient list")
    c = _trim(c)
    degree = c.size - 1
    if degree > tol.max_root_degree:
        raise InvalidParameter(f"degree {degree} exceeds the supported maximum {tol.max_root_degree}")
    norm = float(np.max(np.abs(c)))

    zero_mult = 0
    while zero_mult < degree and c[zero_mult] == 0:
        zero_mult += 1
    reduced = c[zero_mult:]

    roots: list[tuple[complex, int]] = []
    if zero_mult:
        roots.append((0j, zero_mult))
    if reduced.size > 1:
        approx = _aberth(reduced, tol.root_max_iter)
        for group in _clusters(approx, tol.cluster_radius):
            centre = complex(np.mean(approx[group]))
            mu = len(group)
            confirmed = all(
                abs(npoly.polyval(centre, npoly.polyder(reduced, k) if k else reduced))
                <= tol.derivative_vanish * norm
                for k in range(mu)
            )
            if confirmed:
                roots.append((_polish(reduced, centre, mu), mu))
            else:
                roots.extend((_polish(reduced, complex(approx[i]), 1), 1) for i in group)

    residual = max((abs(npoly.polyval(z, c)) for z, _ in roots), default=0.0)
    roots.sort(key=lambda r: (round(r[0].real, 12), round(r[0].imag, 12)))
    return RootSet(roots, float(residual))


def winding_number(samples, tol: Tolerances | None = None) -> int:
    """Winding number about 0 of the closed polygon through ``samples``.

    Sums principal-branch argument increments, including the closing step
    from the last sample back to the first.
    """
    tol = resolve(tol)
    s = np.asarray(samples, dtype=complex).ravel()
    if s.size < 3:
        raise UndersampledCurve("need at least three samples")
    if s[-1] == s[0]:
        s = s[:-1]
    if np.min(np.abs(s)) < tol.origin_guard:
        raise CurveThroughOrigin("curve passes within the origin guard radius", min_modulus=float(np.min(np.abs(s))))
    steps = np.angle(np.roll(s, -1) / s)
    worst = float(np.max(np.abs(steps)))
    if worst >= math.pi * (1 - 1e-9):
        raise UndersampledCurve("argument increment reaches pi", max_increment=worst)
    return int(round(float(np.sum(steps)) / (2 * math.pi)))


def principal_cbrt(w: complex) -> complex:
    """Principal cube root (argument in (-pi/3, pi/3])."""
    if w == 0:
        return 0j
    return cmath.exp(cmath.log(w) / 3)
