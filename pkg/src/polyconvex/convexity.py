"""Decision procedures for local polynomial convexity at the origin.

Plane configurations are given in Weinstock normal form ``R^2``,
``(A1 + iI) R^2``, ``(A2 + iI) R^2``. Only sufficient criteria are known for
three planes, so the decider answers ``Unknown`` when none applies and
reports how far each criterion was from holding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .config import Tolerances, resolve
from .errors import InvalidParameter, NotTransverse, PolyConvexError
from .invariants import InvariantReport, compute_invariants
from .kernel import as_matrix, det2
from .planes import family_matrices, pairwise_reduction

SQRT3_OVER_2 = math.sqrt(3.0) / 2
STAR = math.sqrt(15 - math.sqrt(33)) / (2 * math.sqrt(2))
STAR_SQUARED = (15 - math.sqrt(33)) / 8


class Status(str, enum.Enum):
    LPC = "LocallyPolynomiallyConvex"
    NOT_LPC = "NotLocallyPolynomiallyConvex"
    HULL_BALL = "HullContainsBall"
    HULL_DISCS = "HullContainsDiscFamily"
    UNKNOWN = "Unknown"

    @property
    def decided(self) -> bool:
        return self is not Status.UNKNOWN


class SurfaceKind(str, enum.Enum):
    EXACT_CUBIC = "ExactCubic"
    PERTURBED = "Perturbed"


@dataclass(frozen=True)
class ConvexityVerdict:
    status: Status
    criterion: str = ""
    witness: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status is not Status.UNKNOWN and not self.criterion:
            raise ValueError("a decided verdict needs a criterion tag")

    def to_dict(self) -> dict:
        return {"status": self.status.value, "criterion": self.criterion, "witness": self.witness}

    @classmethod
    def from_dict(cls, data: dict) -> "ConvexityVerdict":
        return cls(Status(data["status"]), data.get("criterion", ""), data.get("witness", {}))


def weinstock_pair_check(a, tol: Tolerances | None = None) -> ConvexityVerdict:
    """``R^2 u (A + iI) R^2`` is locally polynomially convex unless ``A`` has a
    purely imaginary eigenvalue of modulus greater than 1."""
    tol = resolve(tol)
    a = as_matrix(a)
    tr, det = float(np.trace(a)), float(det2(a))
    witness = {"trace": tr, "det": det}
    if abs(tr) <= tol.weinstock and det > 0:
        witness["imaginary_modulus"] = math.sqrt(det)
        if det > 1 + tol.weinstock:
            return ConvexityVerdict(Status.NOT_LPC, "imaginary-eigenvalue-beyond-unit", witness)
        if abs(det - 1) <= tol.weinstock:
            return ConvexityVerdict(Status.UNKNOWN, "", witness)
    return ConvexityVerdict(Status.LPC, "weinstock-pair", witness)


# --- three-plane criteria -------------------------------------------------
# Each returns (applies, margin, detail). A positive margin means the
# criterion's inequalities hold with that much room.


def _real_spectrum(spec) -> bool:
    return all(l.imag == 0 for l in spec)


def _both(*margins: float) -> float:
    return min(margins)


def _either(*margins: float) -> float:
    return max(margins)


def _real_spectra(inv: InvariantReport, tol: Tolerances):
    if not (inv.in_omega and _real_spectrum(inv.spectrum_a1) and _real_spectrum(inv.spectrum_a2)):
        return False, None, {"hypothesis": "omega and real spectra"}
    dc = inv.det_commutator
    d = (inv.det_a1, inv.det_a2)
    th = (inv.theta_12, inv.theta_21)
    all_pos = _both(d[0] * dc, d[1] * dc)
    some_neg = _either(*(_both(-d[j] * dc, -d[j] * th[j]) for j in (0, 1)))
    margin = _either(all_pos, some_neg)
    return margin > tol.strict, margin, {"same_sign_margin": all_pos, "opposite_sign_margin": some_neg}


def _mixed_spectra(inv: InvariantReport, tol: Tolerances):
    if not (inv.in_omega and _real_spectrum(inv.spectrum_a1) and not _real_spectrum(inv.spectrum_a2)):
        return False, None, {"hypothesis": "omega, first spectrum real, second complex"}
    dc = inv.det_commutator
    first = _both(-inv.det_a1 * dc, -inv.det_a1 * inv.theta_12)
    second = inv.lambda_ - inv.theta_12
    margin = _either(first, second)
    return margin > tol.strict, margin, {"sign_margin": first, "lambda_minus_theta": second}


def _complex_spectra(inv: InvariantReport, tol: Tolerances):
    if not (inv.in_omega and not _real_spectrum(inv.spectrum_a1) and not _real_spectrum(inv.spectrum_a2)):
        return False, None, {"hypothesis": "omega and complex spectra"}
    margin = _either(inv.lambda_ - inv.theta_12, inv.lambda_ - inv.theta_21)
    return margin > tol.strict, margin, {}


def _singular_det(inv: InvariantReport, tol: Tolerances):
    # det A1 = 0 is an equality; accept it within the Weinstock tolerance
    zero = tol.weinstock - abs(inv.det_a1)
    margin = _both(zero, inv.det_a2 + tol.weinstock, inv.det_commutator)
    applies = zero >= 0 and inv.det_a2 >= -tol.weinstock and inv.det_commutator > tol.strict
    return applies, margin, {"det_a1": inv.det_a1, "det_a2": inv.det_a2}


def _negative_det_bounded(inv: InvariantReport, tol: Tolerances):
    d1, d2 = inv.det_a1, inv.det_a2
    margin = _both(1 + d1, 1 + d2, -d1, -d2, inv.det_commutator)
    applies = (
        d1 >= -1 - tol.band
        and d2 >= -1 - tol.band
        and d1 < -tol.strict
        and d2 < -tol.strict
        and inv.det_commutator > tol.strict
    )
    return applies, margin, {"det_a1": d1, "det_a2": d2}


def _negative_det_product(inv: InvariantReport, tol: Tolerances):
    bound = min(inv.det_a2 * inv.tr_a1**2, inv.det_a1 * inv.tr_a2**2)
    excess = inv.beta_ - bound
    margin = _both(-inv.det_a1, -inv.det_a2, inv.det_commutator, excess)
    return margin > tol.strict, margin, {"beta_minus_bound": excess}


# (tag, test, role-dependent). Symmetric criteria are evaluated once.
CRITERIA: list[tuple[str, Callable, bool]] = [
    ("three-plane-real-spectra", _real_spectra, False),
    ("three-plane-mixed-spectra", _mixed_spectra, True),
    ("three-plane-complex-spectra", _complex_spectra, False),
    ("singular-det-sum-of-squares", _singular_det, True),
    ("negative-det-sum-of-squares", _negative_det_bounded, False),
    ("negative-det-product", _negative_det_product, False),
]


def pairwise_gate(a1, a2, tol: Tolerances | None = None) -> tuple[ConvexityVerdict, dict]:
    """Weinstock test on the three pairs ``(P0, P1)``, ``(P0, P2)``, ``(P1, P2)``."""
    tol = resolve(tol)
    try:
        b = pairwise_reduction(a1, a2, tol)
    except NotTransverse as exc:
        return ConvexityVerdict(Status.UNKNOWN, "", {"pairwise": exc.to_dict()}), {}
    checks = {
        "P0-P1": weinstock_pair_check(a1, tol),
        "P0-P2": weinstock_pair_check(a2, tol),
        "P1-P2": weinstock_pair_check(b, tol),
    }
    detail = {k: v.to_dict() for k, v in checks.items()}
    failed = [k for k, v in checks.items() if v.status is Status.NOT_LPC]
    if failed:
        return ConvexityVerdict(Status.NOT_LPC, "pairwise", {"failed_pairs": failed, "pairs": detail}), detail
    if any(v.status is Status.UNKNOWN for v in checks.values()):
        return ConvexityVerdict(Status.UNKNOWN, "", {"pairs": detail}), detail
    return ConvexityVerdict(Status.LPC, "pairwise", {"pairs": detail}), detail


def three_plane_decider(a1, a2, tol: Tolerances | None = None) -> ConvexityVerdict:
    """Sufficient-criterion decider for ``R^2 u (A1 + iI) R^2 u (A2 + iI) R^2``.

    The pairwise unions are checked first; a failing pair settles the
    question negatively. Criteria are then tried in a fixed order, each with
    both role assignments where the criterion is not symmetric.
    """
    tol = resolve(tol)
    a1, a2 = as_matrix(a1), as_matrix(a2)
    gate, pairs = pairwise_gate(a1, a2, tol)
    if gate.status is not Status.LPC:
        return gate
    orders = {"A1,A2": compute_invariants(a1, a2, tol), "A2,A1": compute_invariants(a2, a1, tol)}
    margins: dict[str, Any] = {}
    for tag, test, role_dependent in CRITERIA:
        for order, inv in orders.items():
            applies, margin, detail = test(inv, tol)
            key = f"{tag}[{order}]" if role_dependent else tag
            margins[key] = margin
            if applies:
                witness = {"roles": order, "margin": margin, "pairs": pairs, **detail}
                return ConvexityVerdict(Status.LPC, tag, witness)
            if not role_dependent:
                break
    return ConvexityVerdict(Status.UNKNOWN, "", {"margins": margins, "pairs": pairs})


# --- surface families -----------------------------------------------------


@dataclass(frozen=True)
class FamilyClassification:
    t: float
    surface_kind: SurfaceKind
    verdict: ConvexityVerdict
    maslov_index: int | None
    maslov_defined: bool
    thresholds: dict[str, float] = field(default_factory=lambda: {"sqrt3_over_2": SQRT3_OVER_2, "star": STAR})

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "surface_kind": self.surface_kind.value,
            "verdict": self.verdict.to_dict(),
            "maslov_index": self.maslov_index,
            "maslov_defined": self.maslov_defined,
            "thresholds": dict(self.thresholds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FamilyClassification":
        return cls(
            t=data["t"],
            surface_kind=SurfaceKind(data["surface_kind"]),
            verdict=ConvexityVerdict.from_dict(data["verdict"]),
            maslov_index=data["maslov_index"],
            maslov_defined=data["maslov_defined"],
            thresholds=dict(data["thresholds"]),
        )


def _check_t(t) -> float:
    try:
        t = float(t)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter("t must be a real number") from exc
    if not (math.isfinite(t) and t > 0):
        raise InvalidParameter("t must be a positive finite real", t=t)
    return t


def _family_maslov(t: float, tol: Tolerances) -> tuple[int | None, bool]:
    from .analysis import maslov_index_algebraic
    from .kernel import cubic_normal_form

    try:
        return maslov_index_algebraic(cubic_normal_form(t), tol), True
    except PolyConvexError:
        return None, False


def _hyperbolic_verdict(t: float, tol: Tolerances) -> ConvexityVerdict:
    """Verdict for ``t >= star`` with the plane decider's own answer attached."""
    witness: dict[str, Any] = {
        "endpoint_policy": "t equal to the threshold is counted as convex; the non-strict reading is used",
        "at_threshold": abs(t - STAR) <= tol.band,
    }
    try:
        plane_verdict = three_plane_decider(*family_matrices(t, tol), tol)
        witness["tangent_planes"] = {"status": plane_verdict.status.value, "criterion": plane_verdict.criterion}
    except PolyConvexError as exc:
        witness["tangent_planes"] = exc.to_dict()
    return ConvexityVerdict(Status.LPC, "three-plane-lift", witness)


def _elliptic_verdict(t: float, tol: Tolerances) -> ConvexityVerdict | None:
    if t < SQRT3_OVER_2 - tol.band:
        return ConvexityVerdict(Status.HULL_BALL, "two-preimages-ball", {"band": "(0, sqrt(3)/2)"})
    if t < 1 - tol.band:
        return ConvexityVerdict(Status.HULL_DISCS, "four-preimages-disc-family", {"band": "[sqrt(3)/2, 1)"})
    return None


def classify_cubic_surface(t, tol: Tolerances | None = None) -> FamilyClassification:
    """Classify ``S_t = {w = z^2 zb + t z zb^2 + (t^2/3) zb^3}`` at the origin."""
    tol = resolve(tol)
    t = _check_t(t)
    verdict = _elliptic_verdict(t, tol)
    if verdict is None:
        if abs(t - 1) <= tol.band:
            verdict = ConvexityVerdict(Status.LPC, "parabolic-kallin-linear", {"separating_polynomial": "z"})
        elif t >= STAR - tol.band:
            verdict = _hyperbolic_verdict(t, tol)
        else:
            verdict = ConvexityVerdict(
                Status.UNKNOWN,
                "",
                {"open_question": "conjectured convex for 1 < t^2 <= (15 - sqrt(33))/8", "gap": [1.0, STAR]},
            )
    index, defined = _family_maslov(t, tol)
    return FamilyClassification(t, SurfaceKind.EXACT_CUBIC, verdict, index, defined)


def classify_perturbed_surface(t, tol: Tolerances | None = None) -> FamilyClassification:
    """Classify ``M_t``, a higher-order perturbation of ``S_t``, at the origin."""
    tol = resolve(tol)
    t = _check_t(t)
    verdict = _elliptic_verdict(t, tol)
    if verdict is None:
        if abs(t - 1) <= tol.band:
            verdict = ConvexityVerdict(
                Status.UNKNOWN, "", {"open_question": "parabolic CR singularity of higher order"}
            )
        elif t >= STAR - tol.band:
            verdict = _hyperbolic_verdict(t, tol)
        else:
            verdict = ConvexityVerdict(
                Status.UNKNOWN,
                "",
                {"open_question": "convexity for 1 < t^2 <= (15 - sqrt(33))/8 is open", "gap": [1.0, STAR]},
            )
    index, defined = _family_maslov(t, tol)
    return FamilyClassification(t, SurfaceKind.PERTURBED, verdict, index, defined)


def bishop_t(gamma) -> tuple[float, str]:
    """``t = 2 gamma`` and the CR-singularity type it names."""
    try:
        gamma = float(gamma)
    except (TypeError, ValueError) as exc:
        raise InvalidParameter("gamma must be a real number") from exc
    if not math.isfinite(gamma) or gamma < 0:
        raise InvalidParameter("gamma must be a nonnegative finite real", gamma=gamma)
    t = 2 * gamma
    if t < 1:
        kind = "elliptic"
    elif t == 1:
        kind = "parabolic"
    else:
        kind = "hyperbolic"
    return t, kind
