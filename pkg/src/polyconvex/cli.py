"""Command-line interface: ``polyconvex <command> ...``.

Exit codes: 0 success, 2 invalid arguments, 3 computation error,
4 verdict ``Unknown`` when ``--strict`` is given. Errors are written to
standard error as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import analysis, certify, convexity
from .errors import InvalidParameter, PolyConvexError
from .invariants import compute_invariants
from .kernel import HermitianPoly, cubic_normal_form
from .planes import (
    CubicCoefficients,
    TotallyRealPlane,
    factor_cubic_preimage,
    family_matrices,
    verify_pullback,
    weinstock_normal_form,
)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_UNKNOWN = 0, 2, 3, 4


class UsageError(Exception):
    pass


# --- JSON output ----------------------------------------------------------------


def to_json(obj: Any) -> str:
    """Serialize with sorted keys and floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        return format(x, ".17g")
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{to_json(v)}" for k, v in items) + "}"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return to_json(obj.to_dict())
    if hasattr(obj, "value"):
        return to_json(obj.value)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj: Any, out) -> None:
    out.write(to_json(obj) + "\n")


# --- argument parsing -------------------------------------------------------------

_TAG = re.compile(r"^(?:z(\d*))?(?:zb(\d*))?$")
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_GENERIC = re.compile(rf"^\s*(\d+)\s*,\s*(\d+)\s*:\s*({_NUM})\s*,\s*({_NUM})\s*(?:,|$)")
_TAGGED = re.compile(r"^\s*([a-z0-9]+)\s*:\s*([^,]+)\s*(?:,|$)")


def _power(digits: str | None) -> int:
    if digits is None:
        return 0
    return int(digits) if digits else 1


def parse_poly(spec: str) -> HermitianPoly:
    """Parse ``z2zb:1,zzb2:0.5`` or ``2,1:1,0`` (``m,n:re,im``) term lists.

    Tagged values may be complex literals such as ``1+2j``.
    """
    rest = spec.strip()
    terms: dict[tuple[int, int], complex] = {}
    if not rest:
        raise UsageError("empty polynomial spec")
    while rest:
        m = _GENERIC.match(rest)
        if m:
            key = (int(m.group(1)), int(m.group(2)))
            value = complex(float(m.group(3)), float(m.group(4)))
        else:
            m = _TAGGED.match(rest)
            if not m:
                raise UsageError(f"cannot parse polynomial term near {rest!r}")
            tag = _TAG.match(m.group(1))
            if not tag or not m.group(1):
                raise UsageError(f"unknown monomial tag {m.group(1)!r}")
            key = (_power(tag.group(1)), _power(tag.group(2)))
            try:
                value = complex(m.group(2).replace(" ", ""))
            except ValueError as exc:
                raise UsageError(f"bad coefficient {m.group(2)!r}") from exc
        terms[key] = terms.get(key, 0) + value
        rest = rest[m.end() :]
    return HermitianPoly(terms)


def parse_complex(text: str) -> complex:
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(parts[0])
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or a complex literal, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyconvex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify the cubic or perturbed surface at parameter t")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--surface", choices=["cubic", "perturbed"], default="cubic")
    p.add_argument("--json", action="store_true")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("planes", help="invariants and three-plane verdict")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrices", type=Path, help="JSON with 'a1','a2' or 'planes'")
    src.add_argument("--t", type=float)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("maslov", help="Maslov-type index of a homogeneous polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("--method", choices=["algebraic", "winding", "both"], default="both")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=1024)

    p = sub.add_parser("curve", help="coincidences of the boundary curve")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--emit-csv", type=Path)

    p = sub.add_parser("subharmonic", help="Laplacian of Re(p_t / z^(j-1))")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--angles", type=int, default=720)
    p.add_argument("--radii", default="0.25,0.5,1")

    p = sub.add_parser("kallin", help="sample a separation certificate")
    p.add_argument("--case", choices=[c.value for c in certify.KallinCase], required=True)
    p.add_argument("--t", type=float)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--radius", type=float, default=1.0)

    p = sub.add_parser("sweep", help="classify over a grid of t")
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--surface", choices=["cubic", "perturbed"], default="cubic")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("factor", help="split a factorable cubic into three planes")
    for name in ("--a1", "--a2", "--a3"):
        p.add_argument(name, type=parse_complex, required=True, help="complex as re,im")
    p.add_argument("--samples", type=int, default=200)
    return parser


# --- commands ---------------------------------------------------------------------


def _classifier(surface: str):
    return convexity.classify_cubic_surface if surface == "cubic" else convexity.classify_perturbed_surface


def _cmd_classify(args, out) -> int:
    result = _classifier(args.surface)(args.t)
    if args.json:
        _emit(result, out)
    else:
        v = result.verdict
        out.write(f"t={args.t:.17g} surface={args.surface} status={v.status.value} criterion={v.criterion or '-'}\n")
    return EXIT_UNKNOWN if args.strict and result.verdict.status is convexity.Status.UNKNOWN else EXIT_OK


def _load_matrices(path: Path):
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    if "a1" in data and "a2" in data:
        return np.array(data["a1"], dtype=float), np.array(data["a2"], dtype=float)
    if "planes" in data and len(data["planes"]) == 3:
        p0, p1, p2 = (TotallyRealPlane.from_dict(p) for p in data["planes"])
        return tuple(weinstock_normal_form(p0, [p1, p2]))
    raise UsageError("matrices file needs 'a1' and 'a2', or three 'planes'")


def _cmd_planes(args, out) -> int:
    a1, a2 = _load_matrices(args.matrices) if args.matrices else family_matrices(args.t)
    verdict = convexity.three_plane_decider(a1, a2)
    _emit({"a1": a1, "a2": a2, "invariants": compute_invariants(a1, a2), "verdict": verdict}, out)
    return EXIT_UNKNOWN if args.strict and verdict.status is convexity.Status.UNKNOWN else EXIT_OK


def _cmd_maslov(args, out) -> int:
    p = parse_poly(args.poly)
    result: dict[str, Any] = {"poly": p}
    if args.method in ("algebraic", "both"):
        result["algebraic"] = analysis.maslov_index_algebraic(p)
    if args.method in ("winding", "both"):
        result["winding"] = analysis.maslov_index_winding(p, args.radius, args.samples)
    _emit(result, out)
    return EXIT_OK


def _cmd_curve(args, out) -> int:
    result = analysis.curve_analysis(cubic_normal_form(args.t), args.j, args.samples)
    if args.emit_csv:
        pairs = args.emit_csv.with_name(args.emit_csv.stem + "_pairs.csv")
        analysis.write_curve_csv(result, args.emit_csv, pairs)
    _emit(result, out)
    return EXIT_OK


def _cmd_subharmonic(args, out) -> int:
    try:
        radii = [float(r) for r in args.radii.split(",")]
    except ValueError as exc:
        raise UsageError("radii must be comma-separated reals") from exc
    _emit(analysis.subharmonicity_check(cubic_normal_form(args.t), args.j, radii, args.angles), out)
    return EXIT_OK


def _cmd_kallin(args, out) -> int:
    data = certify.default_instance(args.case, args.t)
    _emit(certify.kallin_verify(args.case, data, args.samples, args.radius), out)
    return EXIT_OK


def sweep_grid(t_min: float, t_max: float, step: float) -> list[float]:
    if not (step > 0 and 0 < t_min <= t_max and math.isfinite(t_max)):
        raise UsageError("need 0 < t-min <= t-max and step > 0")
    count = int(math.floor((t_max - t_min) / step + 1e-9)) + 1
    return [round(t_min + i * step, 12) for i in range(count)]


def _status(surface: str, t: float) -> str:
    return _classifier(surface)(t).verdict.status.value


def _refine_boundary(surface: str, lo: float, hi: float, tol: float = 1e-10) -> float:
    left = _status(surface, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _status(surface, mid) == left:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sweep(t_min: float, t_max: float, step: float, surface: str = "cubic", workers: int = 1) -> dict:
    """Classifications over the grid and the t-values where the status changes."""
    ts = sweep_grid(t_min, t_max, step)
    classify = _classifier(surface)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(classify, ts))
    else:
        entries = [classify(t) for t in ts]
    boundaries: list[float] = []
    for a, b in zip(entries, entries[1:]):
        if a.verdict.status is not b.verdict.status:
            edge = _refine_boundary(surface, a.t, b.t)
            if not boundaries or edge - boundaries[-1] > step:
                boundaries.append(edge)
    return {"surface": surface, "step": step, "entries": entries, "boundaries": boundaries}


def _cmd_sweep(args, out) -> int:
    report = sweep(args.t_min, args.t_max, args.step, args.surface, args.workers)
    if args.out:
        args.out.write_text(to_json(report) + "\n")
        _emit({"boundaries": report["boundaries"], "entries": len(report["entries"]), "out": str(args.out)}, out)
    else:
        _emit(report, out)
    return EXIT_OK


def _cmd_factor(args, out) -> int:
    c = CubicCoefficients(args.a1, args.a2, args.a3)
    planes = factor_cubic_preimage(c)
    _emit({"planes": planes, "residual": verify_pullback(c, planes, args.samples)}, out)
    return EXIT_OK


COMMANDS = {
    "classify": _cmd_classify,
    "planes": _cmd_planes,
    "maslov": _cmd_maslov,
    "curve": _cmd_curve,
    "subharmonic": _cmd_subharmonic,
    "kallin": _cmd_kallin,
    "sweep": _cmd_sweep,
    "factor": _cmd_factor,
}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        _emit({"error": "InvalidArguments", "message": str(exc)}, err)
        return EXIT_USAGE
    except InvalidParameter as exc:
        _emit(exc.to_dict(), err)
        return EXIT_USAGE
    except PolyConvexError as exc:
        _emit(exc.to_dict(), err)
        return EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
