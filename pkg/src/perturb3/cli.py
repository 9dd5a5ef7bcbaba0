"""Command-line entry point.

Every verb builds a plain dict payload and a list of text lines from the
same data, so ``--json`` mirrors the text output exactly.

Exit codes: 0 ok, 1 a requested check failed, 2 usage error, 3 unreadable
file, 4 malformed input, 5 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import acceptance, faces, formats, graphs, linalg, parity, surgery, vassiliev

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_FILE, EXIT_FORMAT, EXIT_BOUND = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(f"{self.prog}: {message}\n{self.format_usage().rstrip()}", EXIT_USAGE)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_FILE) from None


def _q(x) -> str:
    return formats.format_rational(Fraction(x))


def _edges_text(g: graphs.MultiGraph) -> str:
    return " ".join(f"{t}-{h}" for t, h in g.edges)


Result = Tuple[dict, List[str], bool]


# ---------------------------------------------------------------------------
# verbs


def cmd_enumerate(args) -> Result:
    vassiliev.check_bound(args.n)
    diagrams = graphs.enumerate_diagrams(args.n)
    rows = []
    lines = [f"count {len(diagrams)}"]
    for k, d in enumerate(diagrams):
        aut = len(graphs.automorphisms(d.graph))
        rows.append({"id": k, "vertices": d.graph.vertex_count, "edges": [list(e) for e in d.graph.edges], "automorphisms": aut})
        lines.append(f"{k} aut {aut} edges {_edges_text(d.graph)}")
    return {"n": args.n, "count": len(diagrams), "diagrams": rows}, lines, True


def cmd_parity_check(args) -> Result:
    g = formats.read_graph(_read(args.graphfile))
    rep = parity.verify_relations(g)
    rows = [{"name": r.name, "passed": r.passed} for r in rep.relations + rep.table]
    lines = [f"automorphisms {rep.automorphism_count}"]
    lines += [f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}" for r in rows]
    return {"automorphisms": rep.automorphism_count, "checks": rows, "passed": rep.passed}, lines, rep.passed


def cmd_vn_dim(args) -> Result:
    space = vassiliev.build_space(args.n)
    payload = {"n": args.n, "dim": space.dimension, "diagrams": space.ambient_dim, "relation_rank": space.relation_rank, "basis": space.basis_ids}
    return payload, [f"dim {space.dimension}"], True


def cmd_vn_reduce(args) -> Result:
    text = _read(args.file)
    cat = vassiliev.catalogue(args.n)
    v = formats.parse_diagram_vector(text, args.n, len(cat))
    space = vassiliev.build_space(args.n)
    coords = vassiliev.reduce(v, space)
    lines = [f"basis {k} {_q(c)}" for k, c in zip(space.basis_ids, coords)]
    payload = {"n": args.n, "basis": space.basis_ids, "coordinates": [_q(c) for c in coords]}
    return payload, lines, True


def cmd_faces_list(args) -> Result:
    g = formats.read_graph(_read(args.graphfile))
    fl = faces.codim1_faces(g)
    counts = faces.face_counts(fl)
    lines = [" ".join(f"{k} {v}" for k, v in counts.items())]
    rows = []
    for f in fl:
        rows.append({"kind": f.kind, "vertices": sorted(f.vertices), "edges": sorted(f.edges)})
        lines.append(f"{f.kind} vertices {' '.join(map(str, sorted(f.vertices)))} edges {' '.join(map(str, sorted(f.edges)))}".rstrip())
    return {"counts": counts, "faces": rows}, lines, True


def cmd_faces_corner(args) -> Result:
    c = formats.parse_corner(_read(args.cornerfile))
    try:
        codim = faces.corner_codim(c)
    except faces.FaceError as exc:
        raise formats.FormatError(str(exc)) from None
    payload = {"codim": codim, "principal": len(c.principal), "lobes": c.lobe_count()}
    return payload, [f"codim {codim}", f"principal {len(c.principal)}", f"lobes {c.lobe_count()}"], True


def cmd_faces_glue(args) -> Result:
    g = formats.read_graph(_read(args.graphfile))
    try:
        glued = faces.principal_gluing(g, args.edge)
    except faces.AnomalousExclusion as exc:
        return {"excluded": True, "reason": str(exc)}, [f"excluded: {exc}"], True
    cat = None
    if g.vertex_count % 2 == 0 and not g.has_self_loops() and all(v == 3 for v in g.valences()):
        n = g.vertex_count // 2
        vassiliev.check_bound(n)
        cat = vassiliev.catalogue(n)
    rows, lines = [], []
    for face in glued:
        row = {"tail_flags": [list(f) for f in face.tail_flags], "edges": [list(e) for e in face.graph.edges]}
        cls = None
        if cat is not None:
            cls = cat.oriented_class(face.graph) if face.graph.is_connected() else None
        row["class"] = None if cls is None else {"id": cls[0], "sign": cls[1]}
        rows.append(row)
        tail = " ".join(f"{e}.{s}" for e, s in face.tail_flags)
        tag = "zero" if cls is None else f"{'+' if cls[1] > 0 else '-'}{cls[0]}"
        lines.append(f"tail {tail} class {tag} edges {_edges_text(face.graph)}")
    payload: Dict = {"excluded": False, "faces": rows}
    if cat is not None:
        rel = faces.six_face_relation(cat, g, args.edge)
        space = vassiliev.build_space(cat.n)
        zero = space.normal_form(rel).is_zero()
        payload["sum"] = {str(k): _q(c) for k, c in sorted(rel.coeffs.items())}
        payload["reduces_to_zero"] = zero
        lines.append(f"sum reduces to zero: {'yes' if zero else 'no'}")
    return payload, lines, payload.get("reduces_to_zero", True)


def cmd_faces_qbound(args) -> Result:
    try:
        rep = faces.degenerate_bound(args.k)
    except faces.FaceError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    payload = {
        "k": rep.k,
        "graphs": rep.graph_count,
        "max_vertices": rep.max_vertices,
        "vertex_bound_ok": rep.vertex_bound_ok,
        "max_dimension": rep.max_dimension,
        "dimension_bound_ok": rep.dimension_bound_ok,
    }
    lines = [
        f"graphs {rep.graph_count}",
        f"max vertices {rep.max_vertices} (bound {_q(Fraction(2 * rep.k + 1, 3))}) {'ok' if rep.vertex_bound_ok else 'FAIL'}",
        f"max dimension {rep.max_dimension} (bound {2 * rep.k - 3}) {'ok' if rep.dimension_bound_ok else 'FAIL'}",
    ]
    return payload, lines, rep.passed


def cmd_surgery_eval(args) -> Result:
    data, n = formats.parse_surgery(_read(args.file))
    vassiliev.check_bound(n)
    if isinstance(data, surgery.TorelliData):
        kind, vec = "torelli", surgery.torelli_leading(data, n)
    else:
        kind, vec = "as", surgery.as_leading(data, n)
    cat = vassiliev.catalogue(n)
    coeffs = [vec.coeffs.get(k, Fraction(0)) for k in range(len(cat))]
    lines = [f"{k} {_q(c)}" for k, c in enumerate(coeffs)]
    return {"kind": kind, "n": n, "coefficients": [_q(c) for c in coeffs]}, lines, True


def cmd_surgery_linkupdate(args) -> Result:
    m = formats.parse_matrix(_read(args.matrixfile))
    fr = None if args.framing is None else formats.parse_rational(args.framing)
    try:
        out = surgery.surgery_linking_update(m, args.component - 1, fr)
    except surgery.SurgeryError as exc:
        raise formats.FormatError(str(exc)) from None
    text = formats.format_matrix(out).splitlines()
    return {"matrix": [[_q(x) for x in row] for row in out]}, text, True


def cmd_surgery_correction(args) -> Result:
    m = formats.parse_matrix(_read(args.formfile))
    try:
        sig = surgery.signature(m)
        corr = surgery.framing_correction_1(m)
    except surgery.SurgeryError as exc:
        raise formats.FormatError(str(exc)) from None
    pos, neg, zero = linalg.inertia(m) if m else (0, 0, 0)
    payload = {"signature": sig, "inertia": [pos, neg, zero], "delta_1": _q(corr)}
    return payload, [f"signature {sig}", f"inertia {pos} {neg} {zero}", f"delta_1 {_q(corr)}"], True


def cmd_selftest(args) -> Result:
    results = acceptance.run_checks(args.filter, args.inject_bad_relation)
    if not results:
        raise CliError(f"no check matches {args.filter!r}", EXIT_USAGE)
    ok = all(r.passed for r in results)
    payload = {
        "checks": [{"number": r.number, "name": r.name, "module": r.module, "passed": r.passed, "detail": r.detail} for r in results],
        "passed": ok,
    }
    return payload, acceptance.render(results).splitlines(), ok


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="perturb3", description="Exact combinatorics of perturbative 3-manifold invariants.")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    s = sub.add_parser("enumerate", help="list degree-n Jacobi diagrams")
    s.add_argument("n", type=int)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("parity", help="parity functor signs")
    ps = s.add_subparsers(dest="action", parser_class=_Parser)
    c = ps.add_parser("check", help="verify relations on every automorphism")
    c.add_argument("graphfile")
    c.set_defaults(func=cmd_parity_check)

    s = sub.add_parser("vn", help="Vassiliev spaces")
    vs = s.add_subparsers(dest="action", parser_class=_Parser)
    c = vs.add_parser("dim")
    c.add_argument("n", type=int)
    c.set_defaults(func=cmd_vn_dim)
    c = vs.add_parser("reduce")
    c.add_argument("n", type=int)
    c.add_argument("file")
    c.set_defaults(func=cmd_vn_reduce)

    s = sub.add_parser("faces", help="configuration space faces")
    fs = s.add_subparsers(dest="action", parser_class=_Parser)
    c = fs.add_parser("list")
    c.add_argument("graphfile")
    c.set_defaults(func=cmd_faces_list)
    c = fs.add_parser("corner")
    c.add_argument("cornerfile")
    c.set_defaults(func=cmd_faces_corner)
    c = fs.add_parser("glue")
    c.add_argument("graphfile")
    c.add_argument("--edge", type=int, required=True)
    c.set_defaults(func=cmd_faces_glue)
    c = fs.add_parser("qbound")
    c.add_argument("k", type=int)
    c.set_defaults(func=cmd_faces_qbound)

    s = sub.add_parser("surgery", help="leading-order surgery formulas")
    ss = s.add_subparsers(dest="action", parser_class=_Parser)
    c = ss.add_parser("eval")
    c.add_argument("file")
    c.set_defaults(func=cmd_surgery_eval)
    c = ss.add_parser("linkupdate")
    c.add_argument("matrixfile")
    c.add_argument("--component", type=int, required=True, help="1-based component to surger")
    c.add_argument("--framing", help="p/q, default the diagonal entry")
    c.set_defaults(func=cmd_surgery_linkupdate)
    c = ss.add_parser("correction")
    c.add_argument("formfile")
    c.set_defaults(func=cmd_surgery_correction)

    s = sub.add_parser("selftest", help="run the acceptance checks")
    s.add_argument("--filter", help="check number, name or module substring")
    s.add_argument("--inject-bad-relation", action="store_true")
    s.set_defaults(func=cmd_selftest)
    return p


_FORMAT_ERRORS = (
    formats.FormatError,
    graphs.GraphError,
    parity.ParityError,
    faces.FaceError,
    surgery.SurgeryError,
    vassiliev.DegreeMismatch,
)


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    want_json = "--json" in argv
    try:
        args = parser.parse_args(list(argv))
        if not hasattr(args, "func"):
            raise CliError(parser.format_usage().rstrip(), EXIT_USAGE)
        payload, lines, ok = args.func(args)
    except CliError as exc:
        return _fail(exc.code, str(exc), want_json, out, err)
    except vassiliev.ResourceBoundError as exc:
        return _fail(EXIT_BOUND, str(exc), want_json, out, err)
    except _FORMAT_ERRORS as exc:
        return _fail(EXIT_FORMAT, f"malformed input: {exc}", want_json, out, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.json:
        out.write(json.dumps(payload, sort_keys=True) + "\n")
    else:
        out.write("".join(line + "\n" for line in lines))
    return EXIT_OK if ok else EXIT_CHECK


def _fail(code: int, message: str, want_json: bool, out, err) -> int:
    if want_json:
        out.write(json.dumps({"error": message, "exit": code}, sort_keys=True) + "\n")
    err.write(message + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
