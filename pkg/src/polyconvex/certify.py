"""Sampling checks of Kallin-type separation certificates for unions of
totally-real planes.

For compact pieces ``K0, K1, K2`` of three planes, a polynomial ``P``
certifies convexity of the union when ``P(K0)`` and ``P(K1 u K2)`` sit in
plane regions meeting only at 0 and the zero fiber of ``P`` is simple. Each
region is the exact image cone of a plane under ``P``, worked out from the
quadratic (or linear) form ``P`` restricts to. Samples then confirm that
every image point lies in its declared cone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.stats import qmc

from .config import Tolerances, resolve
from .convexity import Status, pairwise_gate, weinstock_pair_check
from .errors import HypothesisViolated, InvalidParameter, PolyConvexError
from .invariants import compute_invariants
from .kernel import as_matrix, det2
from .planes import (
    TotallyRealPlane,
    family_matrices,
    family_planes,
    plane_from_matrix,
    simultaneous_normal_form,
    weinstock_normal_form,
)


class KallinCase(str, enum.Enum):
    SUM_OF_SQUARES_SINGULAR = "sos-singular"
    SUM_OF_SQUARES_NEGATIVE = "sos-negative"
    PRODUCT = "product"
    LINEAR = "linear"


SEPARATING_POLYNOMIAL = {
    KallinCase.SUM_OF_SQUARES_SINGULAR: "z^2 + w^2",
    KallinCase.SUM_OF_SQUARES_NEGATIVE: "z^2 + w^2",
    KallinCase.PRODUCT: "z w",
    KallinCase.LINEAR: "z + w",
}

_SUM_OF_SQUARES = np.eye(2, dtype=complex)
_PRODUCT = np.array([[0, 0.5], [0.5, 0]], dtype=complex)
_LINEAR = np.array([1, 1], dtype=complex)


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def _as_vec(z: complex) -> np.ndarray:
    return np.array([z.real, z.imag])


@dataclass(frozen=True)
class ConeRegion:
    """Closed convex cone ``{P : n . P >= 0 for every normal n}`` in C = R^2."""

    kind: str  # origin, ray, line, sector, half-plane, plane
    normals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "normals", tuple((float(x) + 0.0, float(y) + 0.0) for x, y in self.normals))

    def violation(self, values: np.ndarray) -> np.ndarray:
        """How far each value lies outside the cone (0 inside)."""
        out = np.zeros(values.shape)
        for nx, ny in self.normals:
            out = np.maximum(out, -(nx * values.real + ny * values.imag))
        return out

    def excludes(self, direction: np.ndarray, tol: float) -> bool:
        """True when the ray along ``direction`` meets the cone only at 0."""
        d = _unit(direction)
        return any(nx * d[0] + ny * d[1] < -tol for nx, ny in self.normals)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "normals": [list(n) for n in self.normals]}


def quadratic_image_cone(form: np.ndarray, tol: float = 1e-12) -> ConeRegion:
    """Image cone of ``x -> x^T H x`` on R^2 for complex symmetric ``H``.

    On the unit circle the image is the ellipse ``c + a cos s + b sin s``.
    A unit normal ``n`` supports the cone iff ``n.c >= |(n.a, n.b)|``, i.e.
    ``n^T G n >= 0`` with ``G = cc^T - aa^T - bb^T`` and ``n.c >= 0``.
    """
    M, N = form.real, form.imag
    c = np.array([np.trace(M), np.trace(N)]) / 2
    a = np.array([M[0, 0] - M[1, 1], N[0, 0] - N[1, 1]]) / 2
    b = np.array([M[0, 1], N[0, 1]])
    scale = max(np.linalg.norm(c), np.linalg.norm(a), np.linalg.norm(b))
    if scale == 0:
        return ConeRegion("origin", ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)))
    c, a, b = c / scale, a / scale, b / scale
    G = np.outer(c, c) - np.outer(a, a) - np.outer(b, b)
    evals, evecs = np.linalg.eigh(G)
    lo, hi = evals
    z = tol * 10
    if hi < -z:
        return ConeRegion("plane", ())
    if lo >= -z:
        # G is PSD: every n with n.c >= 0 supports; the image is the ray along c
        cu = _unit(c)
        p = _perp(cu)
        return ConeRegion("ray", (tuple(cu), tuple(p), tuple(-p)))
    if hi <= z:
        # G is NSD of rank one: supports only along its null line
        n = evecs[:, 1]
        if abs(n @ c) <= z:
            return ConeRegion("line", (tuple(n), tuple(-n)))
        n = n if n @ c > 0 else -n
        return ConeRegion("half-plane", (tuple(n),))
    # indefinite: the two null directions of G bound the dual sector
    r = math.sqrt(hi / -lo)
    v_lo, v_hi = evecs[:, 0], evecs[:, 1]
    normals = []
    for s in (1, -1):
        n = _unit(v_hi + s * r * v_lo)
        normals.append(n if n @ c >= 0 else -n)
    if np.linalg.norm(normals[0] - normals[1]) <= z:
        return ConeRegion("half-plane", (tuple(normals[0]),))
    return ConeRegion("sector", tuple(tuple(n) for n in normals))


def linear_image_cone(coeffs: np.ndarray, tol: float = 1e-12) -> ConeRegion:
    """Image of ``x -> l1 x1 + l2 x2`` on R^2: a line, the origin, or all of C."""
    v1, v2 = _as_vec(complex(coeffs[0])), _as_vec(complex(coeffs[1]))
    scale = max(np.linalg.norm(v1), np.linalg.norm(v2))
    if scale == 0:
        return ConeRegion("origin", ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)))
    if abs(v1[0] * v2[1] - v1[1] * v2[0]) > tol * scale * scale:
        return ConeRegion("plane", ())
    d = _unit(v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2)
    n = _perp(d)
    return ConeRegion("line", (tuple(n), tuple(-n)))


def _quadratic_null_directions(form: np.ndarray, tol: float) -> list[np.ndarray] | None:
    """Real unit ``x`` with ``x^T H x = 0``; ``None`` if the form vanishes."""
    scale = float(np.max(np.abs(form)))
    if scale == 0:
        return None
    H = form / scale
    # pick the real or imaginary part with the larger size to locate candidates
    base = H.real if np.max(np.abs(H.real)) >= np.max(np.abs(H.imag)) else H.imag
    cands = []
    a, b, c = base[1, 1], 2 * base[0, 1], base[0, 0]  # c + b tau + a tau^2 at x = (1, tau)
    if abs(a) <= tol:
        cands.append(np.array([0.0, 1.0]))
        if abs(b) > tol:
            cands.append(_unit(np.array([1.0, -c / b])))
    else:
        disc = b * b - 4 * a * c
        if disc >= -tol:
            root = math.sqrt(max(disc, 0.0))
            for tau in {(-b + root) / (2 * a), (-b - root) / (2 * a)}:
                cands.append(_unit(np.array([1.0, tau])))
    return [x for x in cands if abs(x @ H @ x) <= math.sqrt(tol)]


def _linear_null_directions(coeffs: np.ndarray, tol: float) -> list[np.ndarray] | None:
    m = np.array([[coeffs[0].real, coeffs[1].real], [coeffs[0].imag, coeffs[1].imag]])
    if np.max(np.abs(m)) == 0:
        return None
    _, s, vt = np.linalg.svd(m)
    return [vt[1]] if s[1] <= tol * s[0] else []


@dataclass(frozen=True)
class KallinReport:
    case: KallinCase
    max_violation: float
    zero_fiber_ok: bool
    separation_ok: bool
    samples: int
    ball_radius: float
    seed: int
    regions: list[ConeRegion]
    plane_violations: list[float]
    declared_fiber: list[list[list[float]]]
    computed_fiber: list[list[list[float]]]
    hypotheses: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_violation <= 1e-9 and self.zero_fiber_ok and self.separation_ok

    def to_dict(self) -> dict:
        return {
            "case": self.case.value,
            "separating_polynomial": SEPARATING_POLYNOMIAL[self.case],
            "max_violation": self.max_violation,
            "zero_fiber_ok": self.zero_fiber_ok,
            "separation_ok": self.separation_ok,
            "passed": self.passed,
            "samples": self.samples,
            "ball_radius": self.ball_radius,
            "seed": self.seed,
            "regions": [r.to_dict() for r in self.regions],
            "plane_violations": self.plane_violations,
            "declared_fiber": self.declared_fiber,
            "computed_fiber": self.computed_fiber,
            "hypotheses": self.hypotheses,
        }


# --- hypotheses and normal forms ---------------------------------------------


def _require(cond: bool, name: str, **details) -> None:
    if not cond:
        raise HypothesisViolated(name, **details)


def _gate(a1, a2, tol: Tolerances) -> None:
    verdict, _ = pairwise_gate(a1, a2, tol)
    _require(verdict.status is Status.LPC, "pairwise-convex", status=verdict.status.value)


def _prepare_sos_singular(a1, a2, tol):
    inv = compute_invariants(a1, a2, tol)
    if abs(inv.det_a1) > tol.weinstock and abs(inv.det_a2) <= tol.weinstock:
        a1, a2 = a2, a1
        inv = compute_invariants(a1, a2, tol)
    _require(abs(inv.det_a1) <= tol.weinstock, "det-zero", det_a1=inv.det_a1)
    _require(inv.det_a2 >= -tol.weinstock, "det-nonnegative", det_a2=inv.det_a2)
    _require(inv.det_commutator > tol.strict, "commutator-positive", det_commutator=inv.det_commutator)
    _gate(a1, a2, tol)
    return a1, a2, {"det_a1": inv.det_a1, "det_a2": inv.det_a2, "det_commutator": inv.det_commutator}


def _prepare_sos_negative(a1, a2, tol):
    inv = compute_invariants(a1, a2, tol)
    for name, d in (("det_a1", inv.det_a1), ("det_a2", inv.det_a2)):
        _require(d < -tol.strict, "det-negative", **{name: d})
        _require(d >= -1 - tol.band, "det-at-least-minus-one", **{name: d})
    _require(inv.det_commutator > tol.strict, "commutator-positive", det_commutator=inv.det_commutator)
    _gate(a1, a2, tol)
    return a1, a2, {"det_a1": inv.det_a1, "det_a2": inv.det_a2, "det_commutator": inv.det_commutator}


def _prepare_product(a1, a2, tol):
    inv = compute_invariants(a1, a2, tol)
    _require(inv.det_a1 < -tol.strict and inv.det_a2 < -tol.strict, "det-negative")
    _require(inv.det_commutator > tol.strict, "commutator-positive", det_commutator=inv.det_commutator)
    first = inv.beta_ - inv.det_a2 * inv.tr_a1**2
    second = inv.beta_ - inv.det_a1 * inv.tr_a2**2
    _require(max(first, second) > tol.strict, "beta-bound", beta=inv.beta_)
    if first <= tol.strict:
        a1, a2 = a2, a1
        inv = compute_invariants(a1, a2, tol)
    # the image of the first plane is a line; it must differ from R
    _require(abs(inv.tr_a1) > tol.weinstock, "nonzero-trace", tr_a1=inv.tr_a1)
    _gate(a1, a2, tol)
    return a1, a2, {"beta": inv.beta_, "bound": inv.det_a2 * inv.tr_a1**2, "tr_a1": inv.tr_a1}


def _check_linear_pairs(plane_list, tol: Tolerances) -> dict[str, str]:
    """Each pair must be transverse and Weinstock-convex, or meet in a real line
    (such a union is always locally polynomially convex)."""
    out = {}
    for j in range(3):
        for k in range(j + 1, 3):
            stacked = np.hstack([plane_list[j].realified(), plane_list[k].realified()])
            rank = np.linalg.matrix_rank(stacked, tol=1e-9 * np.linalg.norm(stacked))
            key = f"P{j}-P{k}"
            if rank == 3:
                out[key] = "line"
                continue
            _require(rank == 4, "pairwise-intersection", pair=key, rank=int(rank))
            (b,) = weinstock_normal_form(plane_list[j], [plane_list[k]], tol)
            _require(weinstock_pair_check(b, tol).status is Status.LPC, "pairwise-convex", pair=key)
            out[key] = "transverse"
    return out


# --- sampling -------------------------------------------------------------------


def _plane_samples(plane: TotallyRealPlane, samples: int, radius: float, seed: int) -> np.ndarray:
    """Low-discrepancy points of ``plane`` inside the closed ball of ``radius``."""
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(samples)
    theta = 2 * np.pi * u[:, 1]
    dirs = np.vstack([np.cos(theta), np.sin(theta)])
    pts = plane.point(dirs)
    pts = pts / np.linalg.norm(pts, axis=0)
    return pts * (radius * np.sqrt(u[:, 0]))


def _fiber_distance(points: np.ndarray, fiber: Sequence[np.ndarray]) -> np.ndarray:
    """Distance of C^2 points (columns) from the union of real lines ``R d``."""
    if not fiber:
        return np.linalg.norm(points, axis=0)
    best = np.full(points.shape[1], np.inf)
    for d in fiber:
        proj = np.real(np.conj(d) @ points)
        best = np.minimum(best, np.linalg.norm(points - np.outer(d, proj), axis=0))
    return best


def _same_lines(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: float) -> bool:
    def covered(xs, ys):
        return all(any(min(np.linalg.norm(x - y), np.linalg.norm(x + y)) <= tol for y in ys) for x in xs)

    return covered(a, b) and covered(b, a)


def _c2_direction(plane: TotallyRealPlane, x: np.ndarray) -> np.ndarray:
    v = plane.point(x)
    return v / np.linalg.norm(v)


def _declared_fiber(case: KallinCase, j: int, matrices, tol: Tolerances) -> list[np.ndarray]:
    """Zero-fiber directions (in plane parameters) as the proofs describe them."""
    if case is KallinCase.PRODUCT:
        return [] if j == 2 else [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    if case is KallinCase.SUM_OF_SQUARES_NEGATIVE and j > 0:
        a = matrices[j - 1]
        if abs(det2(a) + 1) <= math.sqrt(tol.band):
            # Im p vanishes on the roots of x^T A x; there Re p = -(det A + 1) |x|^2 = 0
            s1, q, s2 = a[0, 0], a[0, 1], a[1, 1]
            if abs(s2) <= tol.weinstock:
                return [np.array([0.0, 1.0]), _unit(np.array([1.0, -s1 / (2 * q)]))]
            root = math.sqrt(max(q * q - s1 * s2, 0.0))
            return [_unit(np.array([1.0, (-q + sgn * root) / s2])) for sgn in (1, -1)]
    return []


def kallin_verify(
    case: KallinCase | str,
    planes: Sequence | None = None,
    samples: int = 10_000,
    ball_radius: float = 1.0,
    tol: Tolerances | None = None,
) -> KallinReport:
    """Check a separation certificate by sampling ``P`` on the three planes.

    ``planes`` is a Weinstock pair ``(A1, A2)`` for the quadratic cases and
    three :class:`TotallyRealPlane` for the linear case.
    """
    tol = resolve(tol)
    case = KallinCase(case)
    samples = int(samples)
    if samples < 1 or not (ball_radius > 0 and math.isfinite(ball_radius)):
        raise InvalidParameter("samples must be positive and ball_radius a positive real")
    if planes is None:
        planes = default_instance(case)

    hyps: dict[str, Any] = {}
    matrices = None
    if case is KallinCase.LINEAR:
        plane_list = list(planes)
        _require(len(plane_list) == 3, "three-planes")
        for p in plane_list:
            _require(p.is_totally_real(tol), "totally-real")
        hyps["pair_intersections"] = _check_linear_pairs(plane_list, tol)
        forms = [_LINEAR @ p.basis for p in plane_list]
        regions = [linear_image_cone(f) for f in forms]
        nulls = [_linear_null_directions(f, 1e-12) for f in forms]
        evaluate = lambda pts: _LINEAR @ pts  # noqa: E731
    else:
        a1, a2 = (as_matrix(m) for m in planes)
        prepare = {
            KallinCase.SUM_OF_SQUARES_SINGULAR: _prepare_sos_singular,
            KallinCase.SUM_OF_SQUARES_NEGATIVE: _prepare_sos_negative,
            KallinCase.PRODUCT: _prepare_product,
        }[case]
        a1, a2, hyps = prepare(a1, a2, tol)
        try:
            d1, s2, T = simultaneous_normal_form(a1, a2, tol)
        except PolyConvexError as exc:
            raise HypothesisViolated("normal-form", str(exc)) from exc
        matrices = (d1, s2)
        hyps["transform"] = T.tolist()
        plane_list = [TotallyRealPlane(np.eye(2)), plane_from_matrix(d1), plane_from_matrix(s2)]
        S = _PRODUCT if case is KallinCase.PRODUCT else _SUM_OF_SQUARES
        forms = [p.basis.T @ S @ p.basis for p in plane_list]
        regions = [quadratic_image_cone(f) for f in forms]
        nulls = [_quadratic_null_directions(f, 1e-12) for f in forms]
        evaluate = lambda pts: np.einsum("in,ij,jn->n", pts, S, pts)  # noqa: E731

    # separation: P(K0) against the union of the other two images
    if case is KallinCase.SUM_OF_SQUARES_SINGULAR or case is KallinCase.SUM_OF_SQUARES_NEGATIVE:
        dirs0 = [np.array([1.0, 0.0])]
    else:
        r0 = regions[0]
        dirs0 = [np.array(_perp(np.array(r0.normals[0])))] if r0.kind == "line" else []
        dirs0 = dirs0 + [-d for d in dirs0]
    separation_ok = bool(dirs0) and all(
        r.kind != "plane" and all(r.excludes(d, tol.kallin_violation) for d in dirs0) for r in regions[1:]
    )
    if case is KallinCase.LINEAR:
        # the images of K1 and K2 must be lines distinct from each other as well
        n1, n2 = np.array(regions[1].normals[0]), np.array(regions[2].normals[0])
        separation_ok = separation_ok and abs(n1[0] * n2[1] - n1[1] * n2[0]) > tol.kallin_violation

    violations = []
    zero_ok = True
    declared_c2, computed_c2 = [], []
    for j, (plane, region) in enumerate(zip(plane_list, regions)):
        pts = _plane_samples(plane, samples, ball_radius, tol.seed + j)
        vals = evaluate(pts)
        violations.append(max(0.0, float(np.max(region.violation(vals)))))

        if case is KallinCase.LINEAR:
            declared = [np.array([1j, -1j]) / math.sqrt(2)]
        else:
            declared = [_c2_direction(plane, x) for x in _declared_fiber(case, j, matrices, tol)]
        computed = nulls[j]
        if computed is None:
            zero_ok = False
            computed = []
        else:
            computed = [_c2_direction(plane, x) for x in computed]
        zero_ok = zero_ok and _same_lines(declared, computed, tol.zero_fiber)
        small = np.abs(vals) <= tol.kallin_zero * max(ball_radius, 1.0) ** 2
        if np.any(small):
            zero_ok = zero_ok and bool(np.all(_fiber_distance(pts[:, small], declared) <= tol.zero_fiber))
        declared_c2.append([[float(v.real), float(v.imag)] for d in declared for v in d])
        computed_c2.append([[float(v.real), float(v.imag)] for d in computed for v in d])

    return KallinReport(
        case=case,
        max_violation=max(violations),
        zero_fiber_ok=bool(zero_ok),
        separation_ok=bool(separation_ok),
        samples=samples,
        ball_radius=float(ball_radius),
        seed=tol.seed,
        regions=regions,
        plane_violations=violations,
        declared_fiber=declared_c2,
        computed_fiber=computed_c2,
        hypotheses=hyps,
    )


def default_instance(case: KallinCase | str, t: float | None = None):
    """Plane data satisfying the hypotheses of ``case``.

    With ``t`` given, the tangent planes of the cubic surface family are used
    (``t = 1`` for the linear case).
    """
    case = KallinCase(case)
    if case is KallinCase.LINEAR:
        return family_planes(1.0 if t is None else t)
    if t is not None:
        return family_matrices(t)
    if case is KallinCase.SUM_OF_SQUARES_SINGULAR:
        return np.diag([0.0, 1.0]), np.array([[1.0, 1.0], [1.0, 1.0]])
    if case is KallinCase.SUM_OF_SQUARES_NEGATIVE:
        return family_matrices(1.5)
    return family_matrices(1.2)
