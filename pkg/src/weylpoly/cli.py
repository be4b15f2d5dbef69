"""Command line interface.

Exit codes: 0 success, 1 verification violations, 2 usage or configuration
error, 3 internal-consistency abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .apartment import Apartment
from .errors import ConsistencyError, UsageError, WeylPolyError
from .projection import project_scaled
from .render import render_arrangement, render_tessellation, render_thickened
from .rootsys import build_root_system
from .tessellation import Tessellation, sample_plan
from .weightpoly import build_affine, build_vectorial, intersect_polytopes

VALUE_FLAGS = {"--type", "--base", "--seed", "--out", "--point", "--vertex", "--vertices", "--eta",
               "--window", "--grid", "--rand", "--gram-scale"}


def _common(top: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags without clobbering values given before them
    d = None if top else argparse.SUPPRESS
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--type", dest="type_", default=d, help="root system type, e.g. A2, B2, G2, A1xA1")
    p.add_argument("--base", default=d, help="base point in the fundamental alcove, e.g. 1/3,1/3")
    p.add_argument("--seed", type=int, default=d, help="seed for random samples (default 7)")
    p.add_argument("--out", default=d, help="write output to this file instead of stdout")
    p.add_argument("--json", action="store_true", default=None if top else argparse.SUPPRESS, help="emit JSON")
    p.add_argument("--gram-scale", default=d, help="multiply the invariant form by this rational")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common(False)
    parser = argparse.ArgumentParser(prog="weylpoly", parents=[_common(True)],
                                     description="Exact weight polytopes, tessellations and figures.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    roots = sub.add_parser("roots", parents=[common], help="root system data")
    rsub = roots.add_subparsers(dest="action", required=True)
    show = rsub.add_parser("show", parents=[common], help="dump a root system")
    show.add_argument("spec", nargs="?", default=None)

    apt = sub.add_parser("apartment", parents=[common], help="faces of the affine arrangement")
    asub = apt.add_subparsers(dest="action", required=True)
    loc = asub.add_parser("locate", parents=[common], help="face containing a point")
    loc.add_argument("--point", required=True)

    poly = sub.add_parser("polytope", parents=[common], help="weight polytopes")
    psub = poly.add_subparsers(dest="action", required=True)
    for name in ("build", "faces"):
        p = psub.add_parser(name, parents=[common])
        p.add_argument("--vertex", default=None, help="vertex of the arrangement (affine polytope)")
        p.add_argument("--vectorial", action="store_true", help="vectorial polytope of the base point")
    inter = psub.add_parser("intersect", parents=[common])
    inter.add_argument("--vertices", required=True, help="semicolon-separated vertices, e.g. '0,0;1/3,2/3'")

    proj = sub.add_parser("project", parents=[common], help="projection onto a (scaled) polytope")
    proj.add_argument("--vertex", required=True)
    proj.add_argument("--eta", default="1")
    proj.add_argument("--point", required=True)

    tes = sub.add_parser("tessellation", parents=[common], help="tessellation checks")
    tsub = tes.add_subparsers(dest="action", required=True)
    ver = tsub.add_parser("verify", parents=[common])
    _sampling(ver)

    thk = sub.add_parser("thicken", parents=[common], help="thickened tessellation")
    hsub = thk.add_subparsers(dest="action", required=True)
    hl = hsub.add_parser("locate", parents=[common])
    hl.add_argument("--eta", required=True)
    hl.add_argument("--point", required=True)
    hv = hsub.add_parser("verify", parents=[common])
    hv.add_argument("--eta", required=True)
    _sampling(hv)

    ren = sub.add_parser("render", parents=[common], help="SVG figures (rank 2)")
    resub = ren.add_subparsers(dest="action", required=True)
    for name in ("arrangement", "tessellation", "thickened"):
        p = resub.add_parser(name, parents=[common])
        p.add_argument("--window", default="-2,2")
        if name == "thickened":
            p.add_argument("--eta", default="1/2")
    return parser


def _sampling(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", default="-2,2", help="lo,hi (same on every axis)")
    p.add_argument("--grid", type=int, default=41, help="grid points per axis")
    p.add_argument("--rand", type=int, default=500, help="number of random rational samples")


def _join_negative_values(argv: Sequence[str]) -> list[str]:
    """Let ``--window -2,2`` through argparse by rewriting it as ``--window=-2,2``."""
    out: list[str] = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        a = argv[i]
        if a in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1] not in VALUE_FLAGS \
                and len(argv[i + 1]) > 1 and (argv[i + 1][1].isdigit() or argv[i + 1][1] == "."):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _window(text: str) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 2:
        raise UsageError(f"window must be 'lo,hi': {text!r}")
    lo, hi = el.q(parts[0]), el.q(parts[1])
    if lo > hi:
        raise UsageError("window must satisfy lo <= hi")
    return lo, hi


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.spec = args.type_ or getattr(args, "spec", None)
        if not self.spec:
            raise UsageError("missing --type")
        self.seed = 7 if args.seed is None else args.seed
        self.gram_scale = el.q(args.gram_scale) if args.gram_scale else mpq(1)
        self._A = None

    def point(self, text: str) -> tuple:
        x = el.parse_vector(text)
        if len(x) != self.A.n:
            raise UsageError(f"point {text!r} has {len(x)} coordinates, expected {self.A.n}")
        return x

    @property
    def rs(self):
        return self.A.rs

    @property
    def A(self) -> Apartment:
        if self._A is None:
            rs = build_root_system(self.spec, gram_scale=self.gram_scale)
            base = el.parse_vector(self.args.base) if self.args.base else None
            self._A = Apartment(rs, base)
        return self._A


def _emit(args, payload, text: Optional[str] = None) -> None:
    if args.json or text is None:
        out = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    else:
        out = text if text.endswith("\n") else text + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _emit_raw(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(args) -> int:
    ctx = _Ctx(args)
    cmd, action = args.cmd, getattr(args, "action", None)
    if cmd == "roots":
        rs = build_root_system(ctx.spec, gram_scale=ctx.gram_scale)
        payload = rs.to_json()
        payload["weyl_order"] = len(rs.weyl_group_elements()) if rs.rank <= 4 else None
        payload["fundamental_coweights"] = [el.format_vector(w) for w in rs.fundamental_coweights()]
        _emit(args, payload)
        return 0
    A = ctx.A
    if cmd == "apartment":
        x = ctx.point(args.point)
        F = A.locate_face(x)
        payload = {
            "point": el.format_vector(x),
            "face": F.to_json(),
            "dim": A.face_dim(F),
            "is_vertex": A.is_vertex(x),
            "vertices": [el.format_vector(v) for v in A.face_vertices(F)],
        }
        _emit(args, payload)
        return 0
    if cmd == "polytope":
        if action == "intersect":
            face = intersect_polytopes(A, [ctx.point(v) for v in args.vertices.split(";") if v.strip()])
            payload = {"empty": face is None}
            if face is not None:
                payload.update(face.to_json())
            _emit(args, payload)
            return 0
        if args.vectorial or args.vertex is None:
            P = build_vectorial(A.rs, A.base)
        else:
            P = build_affine(A, ctx.point(args.vertex))
        payload = P.to_json()
        if action == "faces":
            payload = {"lambda": payload["lambda"], "faces": payload["faces"],
                       "counts": _dim_counts(P)}
        _emit(args, payload)
        return 0
    if cmd == "project":
        P = build_affine(A, ctx.point(args.vertex))
        res = project_scaled(P, el.q(args.eta), ctx.point(args.point))
        _emit(args, res.to_json())
        return 0
    T = Tessellation(A)
    if cmd == "tessellation":
        lo, hi = _window(args.window)
        rep = T.verify_tessellation(sample_plan(A.n, (lo, hi), args.grid, args.rand, ctx.seed))
        _emit(args, rep.to_json(),
              f"{rep.samples_total} samples, {len(rep.violations)} violations, {rep.elapsed_ms} ms")
        return 0 if rep.ok else 1
    if cmd == "thicken":
        eta = el.q(args.eta)
        if action == "locate":
            cell = T.locate_thick(ctx.point(args.point), eta)
            _emit(args, cell.to_json())
            return 0
        lo, hi = _window(args.window)
        rep = T.verify_thickened(sample_plan(A.n, (lo, hi), args.grid, args.rand, ctx.seed), eta, ctx.seed)
        _emit(args, rep.to_json(),
              f"{rep.samples_total} samples, {len(rep.violations)} violations, {rep.elapsed_ms} ms")
        return 0 if rep.ok else 1
    if cmd == "render":
        lo, hi = _window(args.window)
        if action == "arrangement":
            svg = render_arrangement(T, (lo, hi))
        elif action == "tessellation":
            svg = render_tessellation(T, None, (lo, hi))
        else:
            svg = render_thickened(T, None, el.q(args.eta), (lo, hi))
        _emit_raw(args, svg)
        return 0
    raise UsageError(f"unknown command {cmd}")  # pragma: no cover


def _dim_counts(P) -> dict:
    counts: dict = {}
    for f in P.faces.values():
        counts[str(f.dim)] = counts.get(str(f.dim), 0) + 1
    return dict(sorted(counts.items()))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except ConsistencyError as exc:
        sys.stderr.write(f"internal consistency failure: {exc}\n")
        if exc.evidence is not None:
            sys.stderr.write(json.dumps(exc.evidence, default=str) + "\n")
        return 3
    except WeylPolyError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
