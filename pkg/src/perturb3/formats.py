"""Plain-text file formats.

All formats ignore blank lines and ``#`` comments.  Rationals are written
``p/q`` or as integers.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .faces import Corner, Lobe
from .graphs import GraphError, MultiGraph, format_graph, parse_graph
from .surgery import ASLinkData, SurgeryError, TorelliData, antisymmetric_tensor
from .vassiliev import DiagramVector


class FormatError(ValueError):
    """Input text does not follow the declared format."""


def parse_rational(token: str) -> Fraction:
    try:
        if "." in token or "e" in token.lower():
            raise ValueError
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not an exact rational: {token!r}") from None


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _lines(text: str) -> List[Tuple[int, str, str]]:
    """(line number, raw line without comment, stripped) for nonblank lines."""
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            out.append((no, body, body.strip()))
    return out


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {no}: expected an integer, got {tok!r}") from None


def read_graph(text: str) -> MultiGraph:
    try:
        return parse_graph(text)
    except GraphError as exc:
        raise FormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# diagram vectors


def parse_diagram_vector(text: str, n: int, size: int) -> DiagramVector:
    coeffs: Dict[int, Fraction] = {}
    for no, _, line in _lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {no}: expected '<coefficient> <diagram id>'")
        c = parse_rational(parts[0])
        k = _int(parts[1], no)
        if not 0 <= k < size:
            raise FormatError(f"line {no}: diagram id {k} out of range 0..{size - 1}")
        coeffs[k] = coeffs.get(k, Fraction(0)) + c
    return DiagramVector(n, coeffs)


def format_diagram_vector(v: DiagramVector) -> str:
    return "".join(f"{format_rational(c)} {k}\n" for k, c in sorted(v.coeffs.items()))


# ---------------------------------------------------------------------------
# corners
#
#   vertices 9
#   edge 4 1
#   ...
#   principal 6 10
#   lobe 0 1 2 3 4 5 6
#     lobe 0 1 2          (deeper indentation = nested)


def parse_corner(text: str) -> Corner:
    graph_lines = []
    principal: Optional[List[int]] = None
    stack: List[Tuple[int, List]] = []  # (indent, children list)
    roots: List = []
    for no, raw, line in _lines(text):
        parts = line.split()
        head = parts[0]
        if head in ("vertices", "edge"):
            if principal is not None or roots:
                raise FormatError(f"line {no}: graph lines must come first")
            graph_lines.append(line)
        elif head == "principal":
            if principal is not None:
                raise FormatError(f"line {no}: repeated 'principal' line")
            principal = [_int(t, no) for t in parts[1:]]
        elif head == "lobe":
            indent = len(raw) - len(raw.lstrip())
            node = ([_int(t, no) for t in parts[1:]], [])
            while stack and stack[-1][0] >= indent:
                stack.pop()
            (stack[-1][1] if stack else roots).append(node)
            stack.append((indent, node[1]))
        else:
            raise FormatError(f"line {no}: unexpected {line!r}")
    graph = read_graph("\n".join(graph_lines))

    def build(node) -> Lobe:
        return Lobe(frozenset(node[0]), tuple(build(c) for c in node[1]))

    return Corner(graph, frozenset(principal or ()), tuple(build(r) for r in roots))


def format_corner(c: Corner) -> str:
    out = [format_graph(c.graph).rstrip("\n")]
    out.append("principal " + " ".join(map(str, sorted(c.principal))))

    def emit(lobe: Lobe, depth: int):
        out.append("  " * depth + "lobe " + " ".join(map(str, sorted(lobe.edges))))
        for ch in lobe.children:
            emit(ch, depth + 1)

    for lobe in c.lobes:
        emit(lobe, 0)
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# matrices


def parse_matrix(text: str) -> List[List[Fraction]]:
    rows = []
    for no, _, line in _lines(text):
        rows.append([parse_rational(t) for t in line.split()])
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise FormatError("rows have different lengths")
    return rows


def format_matrix(m) -> str:
    return "".join(" ".join(format_rational(x) for x in row) + "\n" for row in m)


# ---------------------------------------------------------------------------
# surgery data (indices 1-based in the file)
#
#   kind torelli          kind as
#   n 1                   n 1
#   bubble 1 rank 3       components 3
#   tau 1 2 3 1           mu 1 2 3 5
#   lambda 1 2            framing 1 1/1
#   1 0 0
#   ...


def parse_surgery(text: str):
    kind = None
    n = None
    ranks: Dict[int, int] = {}
    taus: Dict[int, Dict] = {}
    current_tau: Optional[int] = None
    lambdas: Dict[Tuple[int, int], List[List[Fraction]]] = {}
    pending: Optional[Tuple[int, int]] = None
    components = None
    mu: Dict = {}
    framings: Dict[int, Fraction] = {}
    for no, _, line in _lines(text):
        parts = line.split()
        head = parts[0]
        if pending is not None and head not in ("kind", "n", "bubble", "tau", "lambda", "components", "mu", "framing"):
            lambdas[pending].append([parse_rational(t) for t in parts])
            continue
        pending = None
        if head == "kind" and len(parts) == 2:
            if parts[1] not in ("torelli", "as"):
                raise FormatError(f"line {no}: kind must be 'torelli' or 'as'")
            kind = parts[1]
        elif head == "n" and len(parts) == 2:
            n = _int(parts[1], no)
        elif head == "bubble" and len(parts) == 4 and parts[2] == "rank":
            i = _int(parts[1], no)
            ranks[i] = _int(parts[3], no)
            taus.setdefault(i, {})
            current_tau = i
        elif head == "tau" and len(parts) in (5, 6):
            if len(parts) == 6:
                bubble, idx = _int(parts[1], no), parts[2:5]
            elif current_tau is None:
                raise FormatError(f"line {no}: 'tau' before any 'bubble'")
            else:
                bubble, idx = current_tau, parts[1:4]
            key = tuple(_int(t, no) - 1 for t in idx)
            taus.setdefault(bubble, {})[key] = parse_rational(parts[-1])
        elif head == "lambda" and len(parts) == 3:
            pending = (_int(parts[1], no), _int(parts[2], no))
            lambdas[pending] = []
        elif head == "components" and len(parts) == 2:
            components = _int(parts[1], no)
        elif head == "mu" and len(parts) == 5:
            mu[tuple(_int(t, no) - 1 for t in parts[1:4])] = parse_rational(parts[4])
        elif head == "framing" and len(parts) == 3:
            framings[_int(parts[1], no)] = parse_rational(parts[2])
        else:
            raise FormatError(f"line {no}: unexpected {line!r}")
    if kind is None or n is None:
        raise FormatError("surgery file needs 'kind' and 'n' lines")
    try:
        if kind == "torelli":
            k = len(ranks)
            if sorted(ranks) != list(range(1, k + 1)):
                raise FormatError("bubbles must be numbered 1..k")
            rank_list = [ranks[i] for i in range(1, k + 1)]
            tau_list = [taus.get(i, {}) for i in range(1, k + 1)]
            pairings = {(i - 1, j - 1): m for (i, j), m in lambdas.items()}
            return TorelliData.build(rank_list, tau_list, pairings), n
        if components is None:
            raise FormatError("'as' data needs a 'components' line")
        fr = [framings.get(i, Fraction(1)) for i in range(1, components + 1)]
        if any(i not in range(1, components + 1) for i in framings):
            raise FormatError("framing index out of range")
        return ASLinkData.build(components, mu, fr), n
    except SurgeryError as exc:
        raise FormatError(str(exc)) from None
