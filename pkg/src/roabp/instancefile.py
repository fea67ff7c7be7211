"""Canonical text format for program and circuit instances.

Line-oriented, with the modulus in the header so fixtures are
self-contained and diff cleanly.  The serializer defines the canonical
form: parsing a canonical file and re-serializing reproduces it byte for
byte.  Grammar (also in the README):

    roabp-file   = "roabp 1" NL prime vars degree width order layer+
    prime        = "prime" INT NL
    vars         = "vars" INT NL
    degree       = "degree" INT NL
    width        = "width" INT NL
    order        = "order" INT+ NL          ; permutation of 0..n-1
    layer        = "layer" IDX "rows" R "cols" C NL degblock* "end" NL
    degblock     = "deg" INT NL row{R}      ; ascending degree, zero
    row          = INT{C} NL                ; matrices omitted

    setml-file   = "setml 1" NL prime vars topfanin blocks block+ linear+
    topfanin     = "topfanin" INT NL
    blocks       = "blocks" INT NL
    block        = "block" INT+ NL          ; ascending variable indices
    linear       = "linear" I J NL const coef* "end" NL
    const        = "const" INT NL
    coef         = "coef" VAR INT NL        ; ascending var, nonzero only

All integers are residues in [0, p).
"""

from __future__ import annotations

from .algebra import Field, UniPoly
from .errors import ParseError
from .model import LinearForm, Roabp, SetMultilinearCircuit


def serialize_roabp(a: Roabp) -> str:
    lines = ["roabp 1"]
    lines.append("prime %d" % a.field.p)
    lines.append("vars %d" % a.n)
    lines.append("degree %d" % a.d)
    lines.append("width %d" % a.w)
    lines.append("order %s" % " ".join(str(v) for v in a.order))
    for li, layer in enumerate(a.layers):
        rows = len(layer)
        cols = len(layer[0]) if rows else 0
        lines.append("layer %d rows %d cols %d" % (li, rows, cols))
        dmax = 0
        for row in layer:
            for e in row:
                if not e.is_zero:
                    dmax = max(dmax, e.degree)
        for deg in range(dmax + 1):
            mat = [[(row[j].coeffs[deg] if deg < len(row[j].coeffs) else 0)
                    for j in range(cols)] for row in layer]
            if not any(any(r) for r in mat):
                continue
            lines.append("deg %d" % deg)
            for r in mat:
                lines.append(" ".join(str(v) for v in r))
        lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_set_multilinear(c: SetMultilinearCircuit) -> str:
    lines = ["setml 1"]
    lines.append("prime %d" % c.field.p)
    lines.append("vars %d" % c.n)
    lines.append("topfanin %d" % c.k)
    lines.append("blocks %d" % len(c.blocks))
    for b in c.blocks:
        lines.append("block %s" % " ".join(str(v) for v in sorted(b)))
    for i in range(c.k):
        for j in range(len(c.blocks)):
            form = c.linears[i][j]
            lines.append("linear %d %d" % (i, j))
            lines.append("const %d" % (form.const % c.field.p))
            for v, coeff in sorted(form.coeffs):
                if coeff % c.field.p:
                    lines.append("coef %d %d" % (v, coeff % c.field.p))
            lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_instance(obj) -> str:
    if isinstance(obj, Roabp):
        return serialize_roabp(obj)
    if isinstance(obj, SetMultilinearCircuit):
        return serialize_set_multilinear(obj)
    raise TypeError("cannot serialize %r" % type(obj))


class _Cursor:
    def __init__(self, text):
        self.lines = text.splitlines()
        self.pos = 0

    @property
    def lineno(self):
        return self.pos  # 1-based number of the *next* line is pos + 1

    def next(self, expect=None):
        while self.pos < len(self.lines):
            raw = self.lines[self.pos]
            self.pos += 1
            line = raw.strip()
            if line:
                parts = line.split()
                if expect is not None and parts[0] != expect:
                    raise ParseError("expected '%s', found '%s'" % (expect, parts[0]), self.pos)
                return parts
        if expect is not None:
            raise ParseError("unexpected end of file, expected '%s'" % expect, self.pos)
        return None

    def peek(self):
        pos = self.pos
        while pos < len(self.lines):
            line = self.lines[pos].strip()
            if line:
                return line.split()
            pos += 1
        return None


def _ints(parts, start, cursor, count=None):
    try:
        vals = [int(v) for v in parts[start:]]
    except ValueError:
        raise ParseError("expected integers in '%s'" % " ".join(parts), cursor.pos)
    if count is not None and len(vals) != count:
        raise ParseError(
            "expected %d integers after '%s', found %d" % (count, parts[0], len(vals)),
            cursor.pos,
        )
    return vals


def parse_instance(text: str):
    """A Roabp or SetMultilinearCircuit from canonical text."""
    cur = _Cursor(text)
    head = cur.next()
    if head is None:
        raise ParseError("empty instance file", 1)
    if head[0] == "roabp":
        if head[1:] != ["1"]:
            raise ParseError("unsupported roabp format version %s" % head[1:], cur.pos)
        return _parse_roabp(cur)
    if head[0] == "setml":
        if head[1:] != ["1"]:
            raise ParseError("unsupported setml format version %s" % head[1:], cur.pos)
        return _parse_setml(cur)
    raise ParseError("unknown instance kind '%s'" % head[0], cur.pos)


def _parse_roabp(cur: _Cursor) -> Roabp:
    p = _ints(cur.next("prime"), 1, cur, 1)[0]
    try:
        field = Field(p)
    except ValueError as exc:
        raise ParseError(str(exc), cur.pos)
    n = _ints(cur.next("vars"), 1, cur, 1)[0]
    d = _ints(cur.next("degree"), 1, cur, 1)[0]
    w = _ints(cur.next("width"), 1, cur, 1)[0]
    order = _ints(cur.next("order"), 1, cur, n)
    layers = []
    for li in range(n):
        parts = cur.next("layer")
        if len(parts) != 6 or parts[2] != "rows" or parts[4] != "cols":
            raise ParseError("malformed layer header '%s'" % " ".join(parts), cur.pos)
        try:
            li_read, rows, cols = int(parts[1]), int(parts[3]), int(parts[5])
        except ValueError:
            raise ParseError("malformed layer header '%s'" % " ".join(parts), cur.pos)
        if li_read != li:
            raise ParseError("layers must appear in order; expected %d" % li, cur.pos)
        coeffs = [[[] for _ in range(cols)] for _ in range(rows)]
        last_deg = -1
        while True:
            nxt = cur.peek()
            if nxt is None:
                raise ParseError("unexpected end of file inside layer %d" % li, cur.pos)
            if nxt[0] == "end":
                cur.next("end")
                break
            deg = _ints(cur.next("deg"), 1, cur, 1)[0]
            if deg <= last_deg:
                raise ParseError("degree blocks must be strictly ascending", cur.pos)
            last_deg = deg
            for r in range(rows):
                row = _ints(cur.next(), 0, cur, cols)
                for j, v in enumerate(row):
                    cell = coeffs[r][j]
                    cell.extend([0] * (deg - len(cell)))
                    cell.append(v)
        layer = [[UniPoly(field, cell) for cell in row] for row in coeffs]
        layers.append(layer)
    a = Roabp(field, layers, order=tuple(order))
    if a.d > d:
        raise ParseError("layer degrees exceed the declared bound %d" % d, cur.pos)
    if a.w > w:
        raise ParseError("layer widths exceed the declared bound %d" % w, cur.pos)
    return a


def _parse_setml(cur: _Cursor) -> SetMultilinearCircuit:
    p = _ints(cur.next("prime"), 1, cur, 1)[0]
    try:
        field = Field(p)
    except ValueError as exc:
        raise ParseError(str(exc), cur.pos)
    n = _ints(cur.next("vars"), 1, cur, 1)[0]
    k = _ints(cur.next("topfanin"), 1, cur, 1)[0]
    q = _ints(cur.next("blocks"), 1, cur, 1)[0]
    blocks = []
    for _ in range(q):
        blocks.append(tuple(_ints(cur.next("block"), 1, cur)))
    linears = [[None] * q for _ in range(k)]
    for i in range(k):
        for j in range(q):
            parts = cur.next("linear")
            ij = _ints(parts, 1, cur, 2)
            if ij != [i, j]:
                raise ParseError(
                    "linear blocks must appear in row-major order, found %s" % ij, cur.pos
                )
            const = _ints(cur.next("const"), 1, cur, 1)[0]
            coeffs = []
            while True:
                nxt = cur.peek()
                if nxt is None:
                    raise ParseError("unexpected end of file inside linear %d %d" % (i, j), cur.pos)
                if nxt[0] == "end":
                    cur.next("end")
                    break
                v, coeff = _ints(cur.next("coef"), 1, cur, 2)
                coeffs.append((v, coeff))
            linears[i][j] = LinearForm(const=const, coeffs=tuple(coeffs))
    return SetMultilinearCircuit(field, n, blocks, linears)


def roabp_with_field(a: Roabp, field: Field) -> Roabp:
    """The same layer data reduced into another prime field."""
    if field == a.field:
        return a
    layers = [
        [[UniPoly(field, e.coeffs) for e in row] for row in layer] for layer in a.layers
    ]
    return Roabp(field, layers, order=a.order)
