"""Rank concentration for matrix-coefficient polynomials.

A chain product D_1(x_1) ... D_n(x_n) over a matrix algebra is expanded to
an ``AlgebraPoly``: exponent vectors mapped to flattened coefficient
matrices.  A polynomial is l-concentrated when the coefficients of
monomials with support below l span the whole coefficient space; after a
shift x -> x + f(t) the span lives over F(t) and every rank is computed
there exactly (fraction-free elimination), so concentration verdicts are
certificates.

The route to a concentrating shift: a weight assignment that isolates a
basis of the coefficient space turns into the shift tuple (t^w1, ..., t^wn);
a family of candidate tuples collapses to one universal tuple through
Lagrange interpolation in a second variable y followed by the substitution
y -> t^(d''+1).  ``search_isolating`` is the brute-force desk-scale oracle
standing in for an explicit weight-family construction, and every use of it
is certified per instance.
"""

from __future__ import annotations

import math
from itertools import combinations, product

from .algebra import (
    NEG_INF,
    Field,
    UniPoly,
    as_residue,
    mat_mul_poly,
    rank_ff_prefix,
    rank_ff_t_prefix,
)
from .errors import CapacityError, CharacteristicError, ShapeError
from .hitting import HittingSet, PitResult, PolyTuple
from .model import DEFAULT_TERM_CAP, Roabp, SetMultilinearCircuit, _per_degree_matrices


def concentration_target(k: int) -> int:
    """ceil(log2(k + 1)): the support bound achievable over a k-dim algebra."""
    if k < 1:
        raise ValueError("algebra dimension must be at least 1")
    return k.bit_length()


class WeightAssignment:
    """Non-negative integer weights per variable, extended additively."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        weights = tuple(int(w) for w in weights)
        if any(w < 0 for w in weights):
            raise ValueError("weights must be non-negative")
        self.weights = weights

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def __eq__(self, other):
        return isinstance(other, WeightAssignment) and other.weights == self.weights

    def __hash__(self):
        return hash(self.weights)

    def monomial_weight(self, exp) -> int:
        return sum(a * w for a, w in zip(exp, self.weights))

    def shift_tuple(self, field: Field) -> PolyTuple:
        """(t^w1, ..., t^wn)."""
        return PolyTuple(field, tuple(UniPoly.monomial(field, w) for w in self.weights))

    def __repr__(self):
        return "WeightAssignment(%s)" % (self.weights,)


class BiPoly:
    """Polynomial in two variables y and t, as a map (deg_y, deg_t) -> residue."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms=None):
        p = field.p
        clean = {}
        for (ey, et), c in (terms or {}).items():
            c = int(c) % p
            if c:
                clean[(int(ey), int(et))] = c
        self.field = field
        self.terms = clean

    @classmethod
    def zero(cls, field):
        return cls(field)

    @classmethod
    def constant(cls, field, c):
        return cls(field, {(0, 0): c})

    @classmethod
    def y(cls, field):
        return cls(field, {(1, 0): 1})

    @classmethod
    def from_unipoly_t(cls, u: UniPoly):
        return cls(u.field, {(0, k): c for k, c in enumerate(u.coeffs) if c})

    @property
    def is_zero(self):
        return not self.terms

    @property
    def deg_y(self):
        return max((ey for ey, _ in self.terms), default=NEG_INF)

    @property
    def deg_t(self):
        return max((et for _, et in self.terms), default=NEG_INF)

    def _check(self, other):
        if other.field != self.field:
            raise ShapeError("mixed field contexts in bivariate arithmetic")

    def __add__(self, other):
        if isinstance(other, int):
            other = BiPoly.constant(self.field, other)
        self._check(other)
        p = self.field.p
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = (res.get(e, 0) + c) % p
            if v:
                res[e] = v
            else:
                res.pop(e, None)
        out = BiPoly.__new__(BiPoly)
        out.field = self.field
        out.terms = res
        return out

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return BiPoly(self.field, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = BiPoly.constant(self.field, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.field.p
            return BiPoly(self.field, {e: v * c for e, v in self.terms.items()})
        self._check(other)
        p = self.field.p
        res = {}
        for (ay, at), ac in self.terms.items():
            for (by, bt), bc in other.terms.items():
                key = (ay + by, at + bt)
                res[key] = (res.get(key, 0) + ac * bc) % p
        return BiPoly(self.field, res)

    __rmul__ = __mul__

    def eval_y(self, alpha) -> UniPoly:
        alpha = as_residue(alpha, self.field)
        p = self.field.p
        coeffs = {}
        for (ey, et), c in self.terms.items():
            coeffs[et] = (coeffs.get(et, 0) + c * pow(alpha, ey, p)) % p
        size = max(coeffs, default=-1) + 1
        out = [0] * size
        for et, c in coeffs.items():
            out[et] = c
        return UniPoly(self.field, out)

    def subst_y_tpow(self, m: int) -> UniPoly:
        """Substitute y by t^m; injective on this polynomial when deg_t < m."""
        coeffs = {}
        for (ey, et), c in self.terms.items():
            k = ey * m + et
            coeffs[k] = (coeffs.get(k, 0) + c) % self.field.p
        size = max(coeffs, default=-1) + 1
        out = [0] * size
        for k, c in coeffs.items():
            out[k] = c
        return UniPoly(self.field, out)

    def __eq__(self, other):
        return (
            isinstance(other, BiPoly)
            and other.field == self.field
            and other.terms == self.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (ey, et) in sorted(self.terms):
            c = self.terms[(ey, et)]
            mono = []
            if ey:
                mono.append("y" if ey == 1 else "y^%d" % ey)
            if et:
                mono.append("t" if et == 1 else "t^%d" % et)
            body = "*".join(mono)
            parts.append(str(c) if not body else (body if c == 1 else "%d*%s" % (c, body)))
        return " + ".join(parts)


def _supp(exp) -> int:
    return sum(1 for a in exp if a)


class AlgebraPoly:
    """Expanded polynomial with vector coefficients over F, F[t], or F[y, t].

    terms maps an exponent vector to a flat coefficient tuple of length dim;
    entry kind is 'int', 'unipoly', or 'bipoly'.  All-zero vectors are not
    stored.
    """

    __slots__ = ("field", "n", "dim", "terms", "kind")

    def __init__(self, field: Field, n: int, dim: int, terms, kind: str):
        self.field = field
        self.n = n
        self.dim = dim
        self.terms = dict(terms)
        self.kind = kind

    @property
    def is_zero(self):
        return not self.terms

    @property
    def individual_degree(self) -> int:
        return max((max(e) for e in self.terms), default=0)

    def coeff(self, exp):
        exp = tuple(exp)
        if exp in self.terms:
            return self.terms[exp]
        if self.kind == "int":
            return (0,) * self.dim
        zero = UniPoly.zero(self.field) if self.kind == "unipoly" else BiPoly.zero(self.field)
        return (zero,) * self.dim

    def scalar_terms(self):
        """For dim-1 polynomials: exponent -> scalar coefficient."""
        if self.dim != 1:
            raise ShapeError("scalar view needs a one-dimensional coefficient space")
        return {e: v[0] for e, v in self.terms.items()}


def _flatten(mat):
    return tuple(v for row in mat for v in row)


def _is_zero_entry(v):
    return v == 0 if isinstance(v, int) else v.is_zero


def algebra_poly_from_layers(
    field: Field, layers, order=None, n=None, term_cap: int = DEFAULT_TERM_CAP
) -> AlgebraPoly:
    """Symbolic chain product with int matrix coefficients."""
    layers = [list(list(r) for r in layer) for layer in layers]
    if n is None:
        n = len(layers)
    if order is None:
        order = tuple(range(len(layers)))
    per_degree = []
    estimate = 1
    for layer in layers:
        mats = _per_degree_matrices(layer, field)
        per_degree.append(mats)
        estimate *= len(mats)
        if estimate > term_cap:
            raise CapacityError(
                "expansion would exceed the term cap (%d > %d)" % (estimate, term_cap)
            )
    p = field.p
    r0 = len(layers[0])
    acc = {(0,) * n: tuple(tuple(1 if i == j else 0 for j in range(r0)) for i in range(r0))}
    for li, mats in enumerate(per_degree):
        var = order[li]
        nxt = {}
        for exp, mat in acc.items():
            rows = len(mat)
            for a, cmat in enumerate(mats):
                if not any(any(row) for row in cmat):
                    continue
                cols = len(cmat[0])
                prod = []
                for row in mat:
                    new = [0] * cols
                    for k, v in enumerate(row):
                        if v:
                            crow = cmat[k]
                            for j in range(cols):
                                new[j] += v * crow[j]
                    prod.append(tuple(c % p for c in new))
                if a == 0:
                    key = exp
                else:
                    kl = list(exp)
                    kl[var] += a
                    key = tuple(kl)
                cur = nxt.get(key)
                if cur is None:
                    nxt[key] = tuple(prod)
                else:
                    nxt[key] = tuple(
                        tuple((x + y) % p for x, y in zip(cr, pr))
                        for cr, pr in zip(cur, prod)
                    )
        acc = {k: v for k, v in nxt.items() if any(any(row) for row in v)}
    shape_cols = len(layers[-1][0])
    dim = r0 * shape_cols
    terms = {e: _flatten(m) for e, m in acc.items()}
    return AlgebraPoly(field, n, dim, terms, "int")


def algebra_poly_from_roabp(a: Roabp, term_cap: int = DEFAULT_TERM_CAP) -> AlgebraPoly:
    """The matrix-coefficient polynomial of the square-form layer product."""
    _, squares, _ = a.square_form()
    return algebra_poly_from_layers(a.field, squares, order=a.order, n=a.n, term_cap=term_cap)


def algebra_poly_from_set_multilinear(c: SetMultilinearCircuit) -> AlgebraPoly:
    """Block product over the k-dim coordinate-wise algebra; any block shapes."""
    field = c.field
    p = field.p
    k = c.k
    acc = {(0,) * c.n: tuple(1 for _ in range(k))}
    for j, block in enumerate(c.blocks):
        factors = {}
        consts = tuple(c.linears[i][j].const % p for i in range(k))
        factors[(0,) * c.n] = consts
        for v in block:
            e = [0] * c.n
            e[v] = 1
            vec = tuple(dict(c.linears[i][j].coeffs).get(v, 0) % p for i in range(k))
            if any(vec):
                factors[tuple(e)] = vec
        nxt = {}
        for e1, v1 in acc.items():
            for e2, v2 in factors.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                prod = tuple(x * y % p for x, y in zip(v1, v2))
                cur = nxt.get(key)
                nxt[key] = prod if cur is None else tuple((x + y) % p for x, y in zip(cur, prod))
        acc = {e: v for e, v in nxt.items() if any(v)}
    return AlgebraPoly(field, c.n, k, acc, "int")


# ---------------------------------------------------------------------------
# Shifts.
# ---------------------------------------------------------------------------


def _entry_shift(coeffs, powers, zero, field):
    """g(x + f) coefficients: per degree b, sum of comb(a, b) c_a f^(a-b)."""
    d = len(coeffs) - 1
    out = []
    for b in range(d + 1):
        acc = zero
        for a in range(b, d + 1):
            c = coeffs[a]
            if not c:
                continue
            acc = acc + (math.comb(a, b) * c) * powers[a - b]
        out.append(acc)
    return out


def shift_layers(field: Field, layers, shift, order=None):
    """Shifted layers as per-degree matrices with polynomial entries.

    shift is indexed by variable; layer i reads order[i].  Entries may be
    UniPoly (a t-shift) or BiPoly (an interpolated y, t shift); the x-degree
    profile of every layer is preserved.
    """
    layers = [list(list(r) for r in layer) for layer in layers]
    if order is None:
        order = tuple(range(len(layers)))
    if len(shift) != len(layers):
        raise ShapeError("need one shift entry per variable")
    first = shift[0]
    if isinstance(first, UniPoly):
        zero = UniPoly.zero(field)
        one = UniPoly.one(field)
    else:
        zero = BiPoly.zero(field)
        one = BiPoly.constant(field, 1)
    out = []
    for li, layer in enumerate(layers):
        f = shift[order[li]]
        dmax = 0
        for row in layer:
            for e in row:
                if not e.is_zero:
                    dmax = max(dmax, e.degree)
        powers = [one]
        for _ in range(dmax):
            powers.append(powers[-1] * f)
        rows = len(layer)
        cols = len(layer[0]) if rows else 0
        per_deg = [[[zero] * cols for _ in range(rows)] for _ in range(dmax + 1)]
        for i, row in enumerate(layer):
            for j, e in enumerate(row):
                coeffs = list(e.coeffs) + [0] * (dmax + 1 - len(e.coeffs))
                shifted = _entry_shift(coeffs, powers, zero, field)
                for b, v in enumerate(shifted):
                    per_deg[b][i][j] = v
        out.append(per_deg)
    return out


def shift_roabp(a: Roabp, shift) -> list:
    """Shift every layer of a program; returns per-degree polynomial matrices."""
    entries = shift.entries if isinstance(shift, PolyTuple) else tuple(shift)
    return shift_layers(a.field, a.layers, entries, order=a.order)


def expand_shifted(field: Field, per_degree_layers, order=None, n=None,
                   term_cap: int = DEFAULT_TERM_CAP) -> AlgebraPoly:
    """Chain product of shifted layers; coefficients become polynomials."""
    if n is None:
        n = len(per_degree_layers)
    if order is None:
        order = tuple(range(len(per_degree_layers)))
    estimate = 1
    for mats in per_degree_layers:
        estimate *= len(mats)
        if estimate > term_cap:
            raise CapacityError(
                "expansion would exceed the term cap (%d > %d)" % (estimate, term_cap)
            )
    sample = per_degree_layers[0][0][0][0]
    if isinstance(sample, UniPoly):
        zero = UniPoly.zero(field)
        kind = "unipoly"
    else:
        zero = BiPoly.zero(field)
        kind = "bipoly"
    r0 = len(per_degree_layers[0][0])
    one = (UniPoly.one(field) if kind == "unipoly" else BiPoly.constant(field, 1))
    ident = [[one if i == j else zero for j in range(r0)] for i in range(r0)]
    acc = {(0,) * n: ident}
    for li, mats in enumerate(per_degree_layers):
        var = order[li]
        nxt = {}
        for exp, mat in acc.items():
            for a, cmat in enumerate(mats):
                if all(_is_zero_entry(v) for row in cmat for v in row):
                    continue
                prod = mat_mul_poly(mat, cmat, zero)
                if a == 0:
                    key = exp
                else:
                    kl = list(exp)
                    kl[var] += a
                    key = tuple(kl)
                cur = nxt.get(key)
                if cur is None:
                    nxt[key] = prod
                else:
                    nxt[key] = [
                        [x + y for x, y in zip(cr, pr)] for cr, pr in zip(cur, prod)
                    ]
        acc = {
            k: v
            for k, v in nxt.items()
            if not all(_is_zero_entry(x) for row in v for x in row)
        }
    dim = r0 * len(per_degree_layers[-1][0][0])
    terms = {e: _flatten(m) for e, m in acc.items()}
    return AlgebraPoly(field, n, dim, terms, kind)


def shifted_algebra_poly(a: Roabp, shift, square: bool = True,
                         term_cap: int = DEFAULT_TERM_CAP) -> AlgebraPoly:
    """Shift a program and expand; square form by default (folded when not).

    The all-zero shift takes the fast path through the int expansion, since
    nothing then carries t.
    """
    entries = shift.entries if isinstance(shift, PolyTuple) else tuple(shift)
    if square:
        _, layers, _ = a.square_form()
    else:
        layers = a.layers
    if all(isinstance(e, UniPoly) and e.is_zero for e in entries):
        return algebra_poly_from_layers(a.field, layers, order=a.order, n=a.n, term_cap=term_cap)
    shifted = shift_layers(a.field, layers, entries, order=a.order)
    return expand_shifted(a.field, shifted, order=a.order, n=a.n, term_cap=term_cap)


# ---------------------------------------------------------------------------
# Concentration and isolation checks.
# ---------------------------------------------------------------------------


def _bivar_rank_prefix(rows, split):
    """Exact rank over F(y, t) via the degree-separating substitution y -> t^M."""
    if not rows or not rows[0]:
        return 0, 0
    dt = 0
    for r in rows:
        for e in r:
            if not e.is_zero:
                dt = max(dt, e.deg_t)
    size = min(len(rows), len(rows[0]))
    m = size * dt + 1
    uni = [[e.subst_y_tpow(m) for e in r] for r in rows]
    return rank_ff_t_prefix(uni, split)


def is_l_concentrated(d_poly: AlgebraPoly, l: int) -> bool:
    """Do coefficients of monomials with support < l span everything?

    Ranks are exact: plain elimination over F for int coefficients,
    fraction-free elimination over F(t) (or F(y, t) through a Kronecker
    substitution) for shifted ones.  The zero polynomial is concentrated
    for every l.
    """
    if d_poly.is_zero:
        return True
    low = [v for e, v in d_poly.terms.items() if _supp(e) < l]
    high = [v for e, v in d_poly.terms.items() if _supp(e) >= l]
    columns = low + high
    # transpose: dim rows, one column per coefficient vector, low-support first
    rows = [[vec[i] for vec in columns] for i in range(d_poly.dim)]
    if d_poly.kind == "int":
        pre, full = rank_ff_prefix(rows, d_poly.field, len(low))
    elif d_poly.kind == "unipoly":
        pre, full = rank_ff_t_prefix(rows, len(low))
    else:
        pre, full = _bivar_rank_prefix(rows, len(low))
    return pre == full


def coefficient_rank(d_poly: AlgebraPoly) -> int:
    """Exact dimension of the coefficient space."""
    if d_poly.is_zero:
        return 0
    columns = list(d_poly.terms.values())
    rows = [[vec[i] for vec in columns] for i in range(d_poly.dim)]
    if d_poly.kind == "int":
        return rank_ff_prefix(rows, d_poly.field, 0)[1]
    if d_poly.kind == "unipoly":
        return rank_ff_t_prefix(rows, 0)[1]
    return _bivar_rank_prefix(rows, 0)[1]


class _Span:
    """Incremental row space over Z_p with containment queries."""

    def __init__(self, field: Field, dim: int):
        self.p = field.p
        self.dim = dim
        self.rows = []  # (pivot index, normalized row)

    def _residual(self, vec):
        p = self.p
        v = [x % p for x in vec]
        for piv, row in self.rows:
            c = v[piv]
            if c:
                for i in range(piv, self.dim):
                    v[i] = (v[i] - c * row[i]) % p
        return v

    def contains(self, vec) -> bool:
        return not any(self._residual(vec))

    def add(self, vec) -> bool:
        v = self._residual(vec)
        for piv in range(self.dim):
            if v[piv]:
                inv = pow(v[piv], self.p - 2, self.p)
                row = [x * inv % self.p for x in v]
                self.rows.append((piv, row))
                self.rows.sort()
                return True
        return False

    @property
    def rank(self):
        return len(self.rows)


def check_basis_isolating(d_poly: AlgebraPoly, wa: WeightAssignment, tie_rule: str = "strict"):
    """Greedy weight-order sweep for the basis-isolation property.

    Monomials are grouped by weight ascending.  Per class, coefficients
    already inside the span of the chosen set pass; the first one outside
    joins the set; a second outside coefficient fails the sweep.  Under the
    default 'strict' rule the span is frozen per class (spanning members
    must be strictly lighter), which is what makes isolation imply
    concentration after the t^w shift.  The looser 'updated' rule lets the
    joiner extend the span immediately, accepting same-weight dependent
    ties; it admits rare cancellations where the implication fails (a
    scalar x1 - x2 with all-zero weights passes the sweep, yet the constant
    shift cancels the witness term), so it is opt-in.

    Returns (True, chosen monomials) or (False, None).
    """
    if d_poly.kind != "int":
        raise ShapeError("isolation is checked over the base field; expand unshifted")
    if tie_rule not in ("updated", "strict"):
        raise ValueError("tie_rule must be 'updated' or 'strict'")
    if len(wa) != d_poly.n:
        raise ShapeError("weight count must match the variable count")
    groups = {}
    for e in d_poly.terms:
        groups.setdefault(wa.monomial_weight(e), []).append(e)
    span = _Span(d_poly.field, d_poly.dim)
    chosen = []
    for weight in sorted(groups):
        exps = sorted(groups[weight], key=lambda e: tuple(reversed(e)))
        if tie_rule == "strict":
            outside = [e for e in exps if not span.contains(d_poly.terms[e])]
            if len(outside) > 1:
                return False, None
            if outside:
                chosen.append(outside[0])
                span.add(d_poly.terms[outside[0]])
        else:
            joined = False
            for e in exps:
                if span.contains(d_poly.terms[e]):
                    continue
                if joined:
                    return False, None
                span.add(d_poly.terms[e])
                chosen.append(e)
                joined = True
    return True, chosen


def search_isolating(
    d_poly: AlgebraPoly,
    max_weight: int | None = None,
    tie_rule: str = "strict",
) -> WeightAssignment | None:
    """First weight vector in [0, max_weight]^n (lexicographic) that isolates.

    Returns None when the whole box fails; callers treat that as an explicit
    search failure, never as a silent fallback.
    """
    n = d_poly.n
    if max_weight is None:
        max_weight = n * (d_poly.individual_degree + 1)
    for cand in product(range(max_weight + 1), repeat=n):
        wa = WeightAssignment(cand)
        ok, _ = check_basis_isolating(d_poly, wa, tie_rule=tie_rule)
        if ok:
            return wa
    return None


# ---------------------------------------------------------------------------
# Interpolation, collapse, and the commutative pipeline.
# ---------------------------------------------------------------------------


class ShiftFamily:
    """Candidate shift tuples with the interpolation nodes that index them."""

    def __init__(self, tuples, nodes):
        tuples = list(tuples)
        if not tuples:
            raise ValueError("a shift family needs at least one member")
        field = tuples[0].field
        n = len(tuples[0])
        for tup in tuples:
            if tup.field != field or len(tup) != n:
                raise ShapeError("family members must share field and length")
        nodes = [as_residue(v, field) for v in nodes]
        if len(nodes) != len(tuples):
            raise ValueError("need exactly one node per family member")
        if len(set(nodes)) != len(nodes):
            raise ValueError("interpolation nodes must be distinct")
        self.field = field
        self.n = n
        self.tuples = tuples
        self.nodes = tuple(nodes)

    def __len__(self):
        return len(self.tuples)

    @property
    def max_degree(self) -> int:
        return max(t.max_degree for t in self.tuples)


def lagrange_tuple(family: ShiftFamily):
    """Bivariate tuple L(y, t) with L at node alpha_i equal to member i.

    deg_y of every entry is below the family size; deg_t is bounded by the
    family degree.  A single-member family gives back that member, constant
    in y.
    """
    field = family.field
    p = field.p
    nodes = family.nodes
    n_members = len(family.tuples)
    basis = []
    for i in range(n_members):
        num = [1]
        den = 1
        for i2 in range(n_members):
            if i2 == i:
                continue
            # multiply num by (y - alpha_{i2})
            shifted = [c * (-nodes[i2]) % p for c in num] + [0]
            for k, c in enumerate(num):
                shifted[k + 1] = (shifted[k + 1] + c) % p
            num = shifted
            den = den * (nodes[i] - nodes[i2]) % p
        inv = pow(den % p, p - 2, p)
        basis.append([c * inv % p for c in num])
    out = []
    for j in range(family.n):
        terms = {}
        for i in range(n_members):
            fij = family.tuples[i][j]
            for ey, cy in enumerate(basis[i]):
                if not cy:
                    continue
                for et, ct in enumerate(fij.coeffs):
                    if not ct:
                        continue
                    key = (ey, et)
                    terms[key] = (terms.get(key, 0) + cy * ct) % p
        out.append(BiPoly(field, terms))
    return tuple(out)


def collapse_bound(n: int, d: int, k: int, max_t_degree: int) -> int:
    """The determinant degree bound d'' = k * (d * n * max_t_degree)."""
    return k * d * n * max_t_degree


def collapse_y(l_tuple, d_doubleprime: int, bound: int | None = None) -> PolyTuple:
    """Substitute y -> t^(d''+1) in every entry, separating the two degrees.

    When the proof-side bound is supplied, a d'' below it is rejected by
    name; without it the substitution is performed as asked.
    """
    if bound is not None and d_doubleprime < bound:
        raise ValueError(
            "collapse exponent %d is below the required bound %d" % (d_doubleprime, bound)
        )
    if d_doubleprime < 0:
        raise ValueError("collapse exponent must be non-negative")
    entries = [e.subst_y_tpow(d_doubleprime + 1) for e in l_tuple]
    field = entries[0].field if entries else None
    return PolyTuple(field, entries)


def commutative_shift(field: Field, n: int, d: int, w: int, family: ShiftFamily,
                      k: int | None = None) -> PolyTuple:
    """One universal shift tuple from a certified family.

    Interpolates the family in y, then collapses y to t^(d''+1) with d''
    computed from the proof's own bound, never hard-coded.  Target support
    is concentration_target(k) with k = w^2 unless a smaller algebra
    dimension is passed explicitly.
    """
    if family.n != n:
        raise ShapeError("family tuples must have length n")
    if k is None:
        k = w * w
    l_tuple = lagrange_tuple(family)
    dt = 0
    for e in l_tuple:
        if not e.is_zero:
            dt = max(dt, e.deg_t)
    ddp = collapse_bound(n, d, k, dt)
    return collapse_y(l_tuple, ddp, bound=ddp)


def concentrated_hitting_set(field: Field, n: int, d: int, l: int,
                             shift: PolyTuple, t_degree: int) -> HittingSet:
    """Grid points on every (l-1)-subset, translated along the shift curve.

    Enumerates each subset T of size min(l-1, n), each value grid in
    [0..d]^|T| padded with zeros, and each tau in 0..t_degree, emitting
    grid + shift(tau).  The point list is exactly the product enumeration,
    so its size is C(n, l-1) * (d+1)^(l-1) * (t_degree+1); degenerate
    shifts (such as the zero tuple) can repeat points.
    """
    if l < 1:
        raise ValueError("support target must be at least 1")
    if len(shift) != n:
        raise ShapeError("shift tuple length must be n")
    need = max(t_degree, d)
    if field.p <= need:
        raise CharacteristicError(
            "field modulus %d is too small for %d distinct values" % (field.p, need + 1),
            required=need + 1,
        )
    p = field.p
    size = min(l - 1, n)
    shift_vals = [shift.eval_at(tau) for tau in range(t_degree + 1)]
    points = []
    for subset in combinations(range(n), size):
        for grid in product(range(d + 1), repeat=size):
            base = [0] * n
            for idx, v in zip(subset, grid):
                base[idx] = v
            for sv in shift_vals:
                points.append(tuple((b + s) % p for b, s in zip(base, sv)))
    return HittingSet(
        tuple(points),
        meta={
            "kind": "concentrated",
            "n": n,
            "d": d,
            "l": l,
            "t_degree": t_degree,
            "prime": p,
            "size_formula": math.comb(n, size) * (d + 1) ** size * (t_degree + 1),
        },
    )


def commutative_blackbox_pit(oracle, field: Field, n: int, d: int, w: int,
                             family: ShiftFamily, k: int | None = None) -> PitResult:
    """Blackbox test for commutative programs via a certified shift family.

    Sound and complete on instances whose matrix polynomial the collapsed
    family shift concentrates; certification happens outside, at desk
    scale, with the exact rank checks.
    """
    if k is None:
        k = w * w
    l = concentration_target(k)
    shift = commutative_shift(field, n, d, w, family, k=k)
    s_deg = shift.max_degree
    t_degree = n * d * s_deg
    hs = concentrated_hitting_set(field, n, d, l, shift, t_degree)
    for pt in hs.points:
        if as_residue(oracle(pt), field):
            return PitResult(True, pt, len(hs.points))
    return PitResult(False, None, len(hs.points))
