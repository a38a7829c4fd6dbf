"""Analytic invariants of a CR singularity ``w = p(z, zb)``.

* Maslov-type index, by root counting and by a winding-number oracle.
* Laplacian of ``Re(p / z^(j-1))`` in closed Laurent form, with a
  grid-based subharmonicity test.
* Self-coincidences of the boundary curve ``C(theta) = p(e^{i theta}) e^{-ik theta}``.
* Extra unit-circle preimages of ``g(z) = z^2 + t z^4 + (t^2/3) z^6``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import Tolerances, resolve
from .errors import (
    DegenerateInput,
    InvalidParameter,
    NotIsolatedSingularity,
    RootOnCircle,
    Undersampled,
    UndersampledCurve,
)
from .kernel import HermitianPoly, LaurentExpr, det2, evaluate, find_roots, winding_number, wirtinger_dbar

SQRT3 = math.sqrt(3.0)
MAX_WINDING_SAMPLES = 1 << 20


# --- Maslov-type index ------------------------------------------------------


def _require_homogeneous(p: HermitianPoly) -> int:
    if p.is_zero() or not p.homogeneous:
        raise InvalidParameter("polynomial must be nonzero and homogeneous")
    (m, n), *_ = p.terms
    return m + n


def dbar_restriction(p: HermitianPoly) -> np.ndarray:
    """Ascending coefficients of ``q(z) = dp/dzb (z, 1)``."""
    d = wirtinger_dbar(p)
    size = max((m for m, _ in d.terms), default=0) + 1
    q = np.zeros(size, dtype=complex)
    for (m, _), c in d.terms.items():
        q[m] += c
    return q


def maslov_index_algebraic(p: HermitianPoly, tol: Tolerances | None = None) -> int:
    """``2 * #(zeros of q in the unit disc) - (k - 1)`` for homogeneous ``p`` of degree ``k``."""
    tol = resolve(tol)
    k = _require_homogeneous(p)
    q = dbar_restriction(p)
    if not np.any(q):
        raise DegenerateInput("dp/dzb vanishes identically; p is holomorphic")
    roots = find_roots(q, tol)
    near = [z for z in roots.locations() if abs(abs(z) - 1) <= tol.root_circle]
    if near:
        raise RootOnCircle(
            "a zero of q lies on the unit circle; the index is ill-conditioned",
            roots=[[z.real, z.imag] for z in near],
        )
    # dp/dzb is homogeneous, so its zeros off 0 are detected on the unit circle
    theta = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    ring = np.abs(evaluate(wirtinger_dbar(p), np.exp(1j * theta)))
    if np.min(ring) <= tol.origin_guard * float(np.max(np.abs(q))):
        raise NotIsolatedSingularity("dp/dzb has zeros away from the origin")
    inside = sum(mu for z, mu in roots.roots if abs(z) < 1)
    return 2 * inside - (k - 1)


def maslov_index_winding(
    p: HermitianPoly, radius: float = 1.0, samples: int = 1024, tol: Tolerances | None = None
) -> int:
    """Winding number of ``theta -> dp/dzb (r e^{i theta})``; samples double until resolved."""
    tol = resolve(tol)
    if not radius > 0:
        raise InvalidParameter("radius must be positive")
    d = wirtinger_dbar(p)
    n = max(int(samples), 8)
    while True:
        theta = np.linspace(0, 2 * np.pi, n, endpoint=False)
        try:
            return winding_number(evaluate(d, radius * np.exp(1j * theta)), tol)
        except UndersampledCurve:
            if n >= MAX_WINDING_SAMPLES:
                raise
            n *= 2


# --- Laplacian and subharmonicity -------------------------------------------


def laplacian_symbolic(p: HermitianPoly, j: int) -> LaurentExpr:
    """``d^2/dz dzb`` of ``Re(p / z^(j-1))`` as a Laurent expression."""
    if int(j) != j or j < 1:
        raise InvalidParameter("j must be a positive integer")
    quotient = LaurentExpr.from_poly(p).shift(-(int(j) - 1), 0)
    real_part = (quotient + quotient.conjugate()).scale(0.5)
    return real_part.mixed_derivative()


def _real_part_function(p: HermitianPoly, j: int):
    quotient = LaurentExpr.from_poly(p).shift(-(int(j) - 1), 0)
    return lambda z: np.real(quotient(z))


@dataclass(frozen=True)
class SubharmonicityReport:
    laplacian: LaurentExpr
    min_on_annulus: float
    subharmonic: bool
    nowhere_harmonic: bool
    grid: tuple[int, int]
    max_imag: float
    fd_max_rel_error: float
    fd_points: int

    def to_dict(self) -> dict:
        return {
            "laplacian": [[m, n, c.real, c.imag] for (m, n), c in sorted(self.laplacian.terms.items())],
            "min_on_annulus": self.min_on_annulus,
            "subharmonic": self.subharmonic,
            "nowhere_harmonic": self.nowhere_harmonic,
            "grid": list(self.grid),
            "max_imag": self.max_imag,
            "fd_max_rel_error": self.fd_max_rel_error,
            "fd_points": self.fd_points,
        }


def finite_difference_laplacian(func, z: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Five-point ``Delta / 4``, which equals ``d^2/dz dzb`` for real ``func``."""
    f0 = func(z)
    total = func(z + h) + func(z - h) + func(z + 1j * h) + func(z - 1j * h) - 4 * f0
    return total / (4 * h * h)


def subharmonicity_check(
    p: HermitianPoly,
    j: int,
    radii=(0.25, 0.5, 1.0),
    angles: int = 720,
    tol: Tolerances | None = None,
) -> SubharmonicityReport:
    """Evaluate the Laplacian of ``Re(p / z^(j-1))`` on a polar grid.

    Subharmonic means the grid minimum is at least ``-tol.subharmonic``.
    Nowhere harmonic means every angular window of width pi/18 on every
    circle contains a grid value above ``tol.subharmonic``.
    """
    tol = resolve(tol)
    radii = np.asarray(list(radii), dtype=float)
    if radii.size == 0 or np.any(radii <= 0):
        raise InvalidParameter("radii must be positive")
    angles = int(angles)
    if angles < 36:
        raise InvalidParameter("need at least 36 angles so every pi/18 window is sampled")
    lap = laplacian_symbolic(p, j)
    theta = np.linspace(0, 2 * np.pi, angles, endpoint=False)
    grid_z = radii[:, None] * np.exp(1j * theta)[None, :]
    values = np.asarray(lap(grid_z), dtype=complex) if not lap.is_zero() else np.zeros_like(grid_z)
    max_imag = float(np.max(np.abs(values.imag)))
    real = values.real
    minimum = float(np.min(real))

    # integer assignment so float rounding never leaves a window empty
    window = (np.arange(angles) * 36) // angles
    nowhere = True
    for w in range(36):
        cols = window == w
        if not np.all(np.max(real[:, cols], axis=1) > tol.subharmonic):
            nowhere = False
            break

    rng = np.random.default_rng(tol.seed)
    count = min(100, real.size)
    picks = rng.choice(real.size, size=count, replace=False)
    zs = grid_z.ravel()[picks]
    h = tol.fd_step * np.abs(zs)
    fd = finite_difference_laplacian(_real_part_function(p, j), zs, h)
    # scaled by the grid magnitude so near-zero Laplacian values do not blow up
    scale = np.maximum(np.abs(real.ravel()[picks]), max(float(np.max(np.abs(real))), 1e-300))
    fd_err = float(np.max(np.abs(fd - real.ravel()[picks]) / scale))

    return SubharmonicityReport(
        laplacian=lap,
        min_on_annulus=minimum,
        subharmonic=minimum >= -tol.subharmonic,
        nowhere_harmonic=nowhere,
        grid=(int(radii.size), angles),
        max_imag=max_imag,
        fd_max_rel_error=fd_err,
        fd_points=count,
    )


# --- boundary curve coincidences --------------------------------------------


@dataclass(frozen=True)
class CoincidencePair:
    theta1: float
    theta2: float
    refined: bool

    @property
    def gap(self) -> float:
        d = abs(self.theta1 - self.theta2) % (2 * math.pi)
        return min(d, 2 * math.pi - d)


@dataclass(frozen=True)
class CurveAnalysis:
    k: int
    j: int
    samples: int
    period: float
    coincidence_pairs: list[CoincidencePair]
    min_arc_gap: float
    property_star_star: bool
    threshold_arc: float
    theta: np.ndarray = field(repr=False, compare=False)
    values: np.ndarray = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "j": self.j,
            "samples": self.samples,
            "period": self.period,
            "coincidence_pairs": [[c.theta1, c.theta2, c.refined] for c in self.coincidence_pairs],
            "min_arc_gap": self.min_arc_gap,
            "property_star_star": self.property_star_star,
            "threshold_arc": self.threshold_arc,
        }


def _curve_terms(p: HermitianPoly) -> tuple[np.ndarray, np.ndarray]:
    """``C(theta) = sum c_n e^{-2 i n theta}`` on the unit circle."""
    coeffs = np.array(list(p.terms.values()), dtype=complex)
    freqs = np.array([-2 * n for _, n in p.terms], dtype=float)
    return coeffs, freqs


def _curve(coeffs, freqs, theta):
    return np.exp(1j * np.multiply.outer(np.asarray(theta, dtype=float), freqs)) @ coeffs


def _curve_derivative(coeffs, freqs, theta):
    return np.exp(1j * np.multiply.outer(np.asarray(theta, dtype=float), freqs)) @ (1j * freqs * coeffs)


def _segment_crossings(pts: np.ndarray, cell: float) -> list[tuple[int, int, float, float]]:
    """Crossings of non-adjacent edges of the closed polygon ``pts``.

    Edges are bucketed by a spatial hash of the given cell size; each entry
    is ``(edge_a, edge_b, s, u)`` with the crossing at fraction ``s`` along
    edge ``a`` and ``u`` along edge ``b``.
    """
    n = len(pts)
    a = pts
    b = np.roll(pts, -1)
    lo_x = np.floor(np.minimum(a.real, b.real) / cell).astype(np.int64)
    hi_x = np.floor(np.maximum(a.real, b.real) / cell).astype(np.int64)
    lo_y = np.floor(np.minimum(a.imag, b.imag) / cell).astype(np.int64)
    hi_y = np.floor(np.maximum(a.imag, b.imag) / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for e in range(n):
        for cx in range(lo_x[e], hi_x[e] + 1):
            for cy in range(lo_y[e], hi_y[e] + 1):
                buckets.setdefault((cx, cy), []).append(e)
    seen = set()
    out = []
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i, e in enumerate(members):
            for f in members[i + 1 :]:
                if abs(e - f) <= 1 or abs(e - f) == n - 1 or (e, f) in seen:
                    continue
                seen.add((e, f))
                d1, d2, r = b[e] - a[e], b[f] - a[f], a[f] - a[e]
                denom = d1.real * d2.imag - d1.imag * d2.real
                if denom == 0:
                    continue
                s = (r.real * d2.imag - r.imag * d2.real) / denom
                u = (r.real * d1.imag - r.imag * d1.real) / denom
                if 0 <= s < 1 and 0 <= u < 1:
                    out.append((e, f, s, u))
    return out


def _refine_pair(coeffs, freqs, t1, t2, tol: Tolerances) -> tuple[float, float, bool]:
    for _ in range(50):
        f = complex(_curve(coeffs, freqs, t1) - _curve(coeffs, freqs, t2))
        if abs(f) <= tol.newton_residual:
            return t1, t2, True
        d1 = complex(_curve_derivative(coeffs, freqs, t1))
        d2 = -complex(_curve_derivative(coeffs, freqs, t2))
        jac = np.array([[d1.real, d2.real], [d1.imag, d2.imag]])
        if abs(det2(jac)) < tol.jacobian_singular:
            return t1, t2, False
        step = np.linalg.solve(jac, [f.real, f.imag])
        t1, t2 = t1 - step[0], t2 - step[1]
    f = complex(_curve(coeffs, freqs, t1) - _curve(coeffs, freqs, t2))
    return t1, t2, abs(f) <= tol.newton_residual


def curve_analysis(p: HermitianPoly, j: int, samples: int = 4096, tol: Tolerances | None = None) -> CurveAnalysis:
    """Self-coincidences of ``C(theta) = p(e^{i theta}, e^{-i theta}) e^{-ik theta}``.

    ``C`` is periodic with period ``2 pi / d``, ``d`` the gcd of the
    frequencies ``2n``; points one period apart always coincide. The curve is
    sampled over one period and its remaining coincidences are the
    self-crossings of that closed polygon, refined by Newton's method.
    Property (**) asks that every coinciding pair splits the circle into arcs
    of length at least ``pi / (k - j + 1)``.
    """
    tol = resolve(tol)
    k = _require_homogeneous(p)
    j = int(j)
    if not k > j >= 1:
        raise InvalidParameter("need k > j >= 1", k=k, j=j)
    freqs_int = [2 * n for _, n in p.terms if n > 0]
    if not freqs_int:
        raise InvalidParameter("p is holomorphic; its boundary curve is constant")
    d = reduce(math.gcd, freqs_int)
    period = 2 * math.pi / d
    samples = int(samples)
    if samples < 16:
        raise InvalidParameter("samples must be at least 16")
    coeffs, freqs = _curve_terms(p)
    theta = np.linspace(0, period, samples, endpoint=False)
    values = _curve(coeffs, freqs, theta)
    spacing = period / samples

    diam = float(np.max(np.abs(values - values.mean()))) * 2 or 1.0
    cell = 10 * diam / samples
    pairs: list[CoincidencePair] = []
    for e, f, s, u in _segment_crossings(values, cell):
        t1, t2, ok = _refine_pair(coeffs, freqs, theta[e] + s * spacing, theta[f] + u * spacing, tol)
        t1, t2 = t1 % period, t2 % period
        gap = abs(t1 - t2)
        gap = min(gap, period - gap)
        if gap <= tol.arc:
            continue  # Newton slid onto the trivial diagonal
        t1, t2 = min(t1, t2), max(t1, t2)
        if any(abs(t1 - c.theta1) < tol.arc * 1e3 and abs(t2 - c.theta2) < tol.arc * 1e3 for c in pairs):
            continue
        for c in pairs:
            if abs(t1 - c.theta1) < spacing and abs(t2 - c.theta2) < spacing:
                raise Undersampled("distinct coincidences fall within one sample spacing", samples=samples)
        pairs.append(CoincidencePair(float(t1), float(t2), bool(ok)))
    pairs.sort(key=lambda c: (c.theta1, c.theta2))

    gaps = [min(abs(c.theta1 - c.theta2), period - abs(c.theta1 - c.theta2)) for c in pairs]
    # points one period apart coincide; with d >= 2 that arc is the period itself
    min_gap = min([min(period, math.pi)] + gaps)
    threshold = math.pi / (k - j + 1)
    return CurveAnalysis(
        k=k,
        j=j,
        samples=samples,
        period=period,
        coincidence_pairs=pairs,
        min_arc_gap=float(min_gap),
        property_star_star=min_gap >= threshold - tol.arc,
        threshold_arc=threshold,
        theta=theta,
        values=values,
    )


def write_curve_csv(analysis: CurveAnalysis, path, pairs_path=None) -> None:
    """Write ``theta,re_C,im_C`` rows, and the coincidence pairs to ``pairs_path``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "re_C", "im_C"])
        for th, c in zip(analysis.theta, analysis.values):
            w.writerow([repr(float(th)), repr(float(c.real)), repr(float(c.imag))])
    if pairs_path is not None:
        with open(pairs_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta1", "theta2", "refined"])
            for c in analysis.coincidence_pairs:
                w.writerow([repr(c.theta1), repr(c.theta2), int(c.refined)])


# --- extra circle preimages of g_t --------------------------------------------


def _g_level_polynomial(t: float, a: complex) -> np.ndarray:
    """Ascending coefficients of ``g(z) - g(a)``."""
    g_a = a**2 + t * a**4 + (t * t / 3) * a**6
    return np.array([-g_a, 0, 1, 0, t, 0, t * t / 3], dtype=complex)


def circle_conditions(t: float, psi: float) -> tuple[float, float]:
    """``(h1, h2)`` with ``h_j / t = |lambda_j|^2 - 1`` for the two extra roots
    ``lambda_j`` in ``w = z^2`` of ``g(z) = g(e^{i psi})``."""
    h1 = 3 / t + 3 * math.cos(2 * psi - math.pi / 3) - SQRT3 * math.sin(2 * psi - math.pi / 3)
    h2 = 3 / t + 3 * math.cos(2 * psi + math.pi / 3) + SQRT3 * math.sin(2 * psi + math.pi / 3)
    return h1, h2


def _check_preimage_domain(t: float, psi: float) -> None:
    if not (math.isfinite(t) and 0 <= t < 1):
        raise InvalidParameter("t must lie in [0, 1)", t=t)
    if not (math.isfinite(psi) and 0 <= psi < 2 * math.pi):
        raise InvalidParameter("psi must lie in [0, 2 pi)", psi=psi)


def preimage_count(t: float, psi: float, method: str = "closed_form", tol: Tolerances | None = None) -> int:
    """Number of points ``z`` on the unit circle with ``g(z) = g(e^{i psi})``."""
    tol = resolve(tol)
    t, psi = float(t), float(psi)
    _check_preimage_domain(t, psi)
    if method == "closed_form":
        if t == 0:
            return 2
        # | |z| - 1 | <= eps for z^2 = lambda  <=>  |h| <= 4 t eps to first order
        return 2 + sum(2 for h in circle_conditions(t, psi) if abs(h) <= 4 * t * tol.circle_filter)
    if method == "brute_force":
        roots = find_roots(_g_level_polynomial(t, complex(math.cos(psi), math.sin(psi))), tol)
        return sum(mu for z, mu in roots.roots if abs(abs(z) - 1) <= tol.circle_filter)
    raise InvalidParameter("method must be 'closed_form' or 'brute_force'", method=method)


def _constraint(x: float) -> float:
    return 3 * math.cos(x) - SQRT3 * math.sin(x)


def constraint_minimum() -> tuple[float, float]:
    """Numerical ``(argmin, min)`` of ``3 cos x - sqrt(3) sin x`` over one period."""
    res = minimize_scalar(_constraint, bounds=(0.0, 2 * math.pi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def min_preimage_threshold() -> float:
    """Smallest ``t`` for which some ``psi`` has extra circle preimages.

    ``h1 = 3/t + (3 cos x - sqrt(3) sin x)`` can vanish only when ``3/t`` is
    at most minus the constraint minimum.
    """
    _, m = constraint_minimum()
    return -3.0 / m


def extra_preimage_angles(t: float) -> list[float]:
    """All ``psi`` in ``[0, 2 pi)`` where ``h1`` or ``h2`` vanishes, ascending."""
    t = float(t)
    if not 0 < t:
        return []
    ratio = -SQRT3 / (2 * t)
    if ratio < -1:
        return []
    spread = math.acos(ratio)
    out = set()
    for base in (math.pi / 6, -math.pi / 6):
        for sign in (1, -1):
            for k in range(-2, 4):
                psi = (base + sign * spread) / 2 + k * math.pi
                if 0 <= psi < 2 * math.pi:
                    out.add(round(psi, 15))
    return sorted(out)


def exists_extra_preimage(t: float, tol: Tolerances | None = None) -> bool:
    """Whether some ``psi`` has four circle preimages, confirmed by root solving."""
    tol = resolve(tol)
    t = float(t)
    if t <= 0:
        return False
    x_min, m = constraint_minimum()
    if 3 / t + m > 0:
        return False
    # h1 as a function of x = 2 psi - pi/3 has a root between argmin and argmin + pi
    x_root = brentq(lambda x: 3 / t + _constraint(x), x_min, x_min + math.pi, xtol=1e-15)
    psi = ((x_root + math.pi / 3) / 2) % (2 * math.pi)
    return preimage_count(t, psi, "brute_force", tol) >= 4


def locate_preimage_transition(lo: float = 0.5, hi: float = 0.99, tol_t: float = 1e-9) -> float:
    """Bisection on ``t`` for the onset of extra circle preimages."""
    if exists_extra_preimage(lo) or not exists_extra_preimage(hi):
        raise InvalidParameter("transition is not bracketed", lo=lo, hi=hi)
    while hi - lo > tol_t:
        mid = 0.5 * (lo + hi)
        if exists_extra_preimage(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
