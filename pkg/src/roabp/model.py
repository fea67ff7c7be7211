"""The ROABP data model.

A program is a chain of layer matrices over univariate polynomials,
D_1(x_{pi(1)}) D_2(x_{pi(2)}) ... D_n(x_{pi(n)}), with the end vectors
folded into the first and last layers: D_1 is 1 x w, D_n is w x 1, and the
interior layers are w x w.  Layer i reads exactly the variable order[i].
That folded chain is the canonical shape; ``Roabp.from_ut`` imports the
U, T form and remembers the square layers so commutativity checks and the
concentration pipeline can see the underlying matrix algebra.

Evaluation is iterated matrix multiplication.  ``expand`` is the
brute-force oracle: the exact sparse polynomial, guarded by a term cap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import (
    Field,
    FieldElem,
    SparseMultiPoly,
    UniPoly,
    as_residue,
    mat_mul,
    rref,
)
from .errors import CapacityError, PartitionError, ShapeError

DEFAULT_TERM_CAP = 1_000_000


def _layer_shape(layer):
    rows = len(layer)
    cols = len(layer[0]) if rows else 0
    for r in layer:
        if len(r) != cols:
            raise ShapeError("ragged layer matrix")
    return rows, cols


def _max_degree(layer):
    d = 0
    for row in layer:
        for entry in row:
            if not entry.is_zero:
                d = max(d, entry.degree)
    return d


def _per_degree_matrices(layer, field):
    """Split a matrix of UniPoly into its per-degree int coefficient matrices."""
    rows, cols = _layer_shape(layer)
    d = _max_degree(layer)
    mats = [[[0] * cols for _ in range(rows)] for _ in range(d + 1)]
    for i, row in enumerate(layer):
        for j, entry in enumerate(row):
            for a, c in enumerate(entry.coeffs):
                if c:
                    mats[a][i][j] = c
    return mats


def _expand_layers_int(field, layers, order, n, term_cap):
    """Symbolic chain product; dict from exponent vector to a flat matrix."""
    estimate = 1
    per_degree = []
    for layer in layers:
        mats = _per_degree_matrices(layer, field)
        per_degree.append(mats)
        estimate *= len(mats)
        if estimate > term_cap:
            raise CapacityError(
                "expansion would exceed the term cap (%d > %d); shrink the instance"
                % (estimate, term_cap)
            )
    p = field.p
    r0 = len(layers[0])
    start = tuple(tuple(1 if i == j else 0 for j in range(r0)) for i in range(r0))
    acc = {(0,) * n: start}
    for li, mats in enumerate(per_degree):
        var = order[li]
        nxt = {}
        for exp, mat in acc.items():
            for a, coeff_mat in enumerate(mats):
                if not any(any(row) for row in coeff_mat):
                    continue
                prod = mat_mul([list(r) for r in mat], coeff_mat, p)
                if a == 0:
                    key = exp
                else:
                    k = list(exp)
                    k[var] += a
                    key = tuple(k)
                cur = nxt.get(key)
                if cur is None:
                    nxt[key] = tuple(tuple(r) for r in prod)
                else:
                    nxt[key] = tuple(
                        tuple((x + y) % p for x, y in zip(cr, pr))
                        for cr, pr in zip(cur, prod)
                    )
        acc = {k: v for k, v in nxt.items() if any(any(row) for row in v)}
    return acc, (r0, len(layers[-1][0]) if layers[-1] else 0)


class Roabp:
    """A read-once oblivious ABP in folded matrix-chain form.

    Immutable once built; every operation is a pure function of the value,
    so instances are safe to evaluate from many threads.
    """

    __slots__ = ("field", "n", "w", "d", "order", "layers", "_ut")

    def __init__(self, field: Field, layers, order=None, ut=None):
        if not layers:
            raise ShapeError("a program needs at least one layer")
        layers = tuple(tuple(tuple(row) for row in layer) for layer in layers)
        n = len(layers)
        shapes = [_layer_shape(layer) for layer in layers]
        if shapes[0][0] != 1:
            raise ShapeError("first layer must have one row, got %dx%d" % shapes[0])
        if shapes[-1][1] != 1:
            raise ShapeError("last layer must have one column, got %dx%d" % shapes[-1])
        for (ra, ca), (rb, cb) in zip(shapes, shapes[1:]):
            if ca != rb:
                raise ShapeError("layer dimensions do not chain: %d cols then %d rows" % (ca, rb))
        w = max(max(r, c) for r, c in shapes) if n > 1 else 1
        for layer in layers:
            for row in layer:
                for entry in row:
                    if not isinstance(entry, UniPoly) or entry.field != field:
                        raise ShapeError("layer entries must be UniPoly over the program field")
        if order is None:
            order = tuple(range(n))
        else:
            order = tuple(order)
            if sorted(order) != list(range(n)):
                raise ShapeError("order must be a permutation of 0..n-1")
        self.field = field
        self.n = n
        self.w = w
        self.d = max(_max_degree(layer) for layer in layers)
        self.order = order
        self.layers = layers
        self._ut = ut

    @classmethod
    def from_ut(cls, field: Field, u, squares, t_vec, order=None) -> "Roabp":
        """Import the U^T D_1 ... D_n T form, folding the end vectors in."""
        squares = tuple(tuple(tuple(row) for row in layer) for layer in squares)
        if not squares:
            raise ShapeError("need at least one square layer")
        w = len(squares[0])
        for layer in squares:
            r, c = _layer_shape(layer)
            if r != w or c != w:
                raise ShapeError("square layers must all be %dx%d" % (w, w))
        u = tuple(int(v) % field.p for v in u)
        t_vec = tuple(int(v) % field.p for v in t_vec)
        if len(u) != w or len(t_vec) != w:
            raise ShapeError("U and T must have length equal to the width")
        zero = UniPoly.zero(field)
        first = [
            [sum_poly([squares[0][k][j] * u[k] for k in range(w)], zero) for j in range(w)]
        ]
        if len(squares) == 1:
            folded_first = [
                [
                    sum_poly([first[0][k] * t_vec[k] for k in range(w)], zero)
                ]
            ]
            layers = [folded_first]
        else:
            last = [
                [sum_poly([squares[-1][i][k] * t_vec[k] for k in range(w)], zero)]
                for i in range(w)
            ]
            layers = [first] + [list(list(r) for r in l) for l in squares[1:-1]] + [last]
        return cls(field, layers, order=order, ut=(u, squares, t_vec))

    @property
    def has_square_form(self) -> bool:
        return self._ut is not None

    def square_form(self):
        """(U, square layers, T).  Reconstructed when not imported that way.

        The reconstruction pads the folded end layers into square matrices
        with unit end vectors; it computes the same scalar polynomial but
        does not recover any commutative structure the folding erased.
        """
        if self._ut is not None:
            return self._ut
        zero = UniPoly.zero(self.field)
        if self.n == 1:
            w = 1
            square = [[self.layers[0][0][0]]]
            return (1,), (tuple(tuple(r) for r in [square[0]]),), (1,)
        w = self.w
        first = [
            [self.layers[0][0][j] if i == 0 else zero for j in range(w)] for i in range(w)
        ]
        last = [
            [self.layers[-1][i][0] if j == 0 else zero for j in range(w)] for i in range(w)
        ]
        mids = []
        for layer in self.layers[1:-1]:
            r, c = _layer_shape(layer)
            padded = [
                [layer[i][j] if i < r and j < c else (UniPoly.one(self.field) if i == j else zero)
                 for j in range(w)]
                for i in range(w)
            ]
            mids.append(padded)
        u = tuple(1 if i == 0 else 0 for i in range(w))
        squares = tuple(tuple(tuple(r) for r in layer) for layer in [first] + mids + [last])
        return u, squares, u

    def eval(self, point) -> FieldElem:
        """Exact value at a point; O(n w^2) work."""
        if len(point) != self.n:
            raise ShapeError("point length %d != %d variables" % (len(point), self.n))
        p = self.field.p
        vals = [as_residue(v, self.field) for v in point]
        vec = None
        for li, layer in enumerate(self.layers):
            x = vals[self.order[li]]
            mat = [[entry(x) for entry in row] for row in layer]
            if vec is None:
                vec = mat[0]
            else:
                cols = len(mat[0])
                new = [0] * cols
                for k, v in enumerate(vec):
                    if v:
                        row = mat[k]
                        for j in range(cols):
                            new[j] += v * row[j]
                vec = [v % p for v in new]
        return FieldElem(self.field, vec[0])

    def expand(self, term_cap: int = DEFAULT_TERM_CAP) -> SparseMultiPoly:
        """The exact polynomial, by symbolic layer products.  Capped."""
        acc, _ = _expand_layers_int(self.field, self.layers, self.order, self.n, term_cap)
        return SparseMultiPoly(self.field, self.n, {e: m[0][0] for e, m in acc.items()})

    def is_commutative(self) -> bool:
        """Whether every pair of square-form coefficient matrices commutes."""
        _, squares, _ = self.square_form()
        p = self.field.p
        mats = []
        for layer in squares:
            for mat in _per_degree_matrices(layer, self.field):
                if any(any(row) for row in mat):
                    mats.append(mat)
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if mat_mul(mats[i], mats[j], p) != mat_mul(mats[j], mats[i], p):
                    return False
        return True

    def constant_term(self) -> int:
        return int(self.eval([0] * self.n))

    def __eq__(self, other):
        return (
            isinstance(other, Roabp)
            and other.field == self.field
            and other.order == self.order
            and other.layers == self.layers
        )

    def __repr__(self):
        return "Roabp(n=%d, w=%d, d=%d, p=%d)" % (self.n, self.w, self.d, self.field.p)


def sum_poly(polys, zero):
    acc = zero
    for q in polys:
        acc = acc + q
    return acc


def _rand_poly(rng, field, d):
    return UniPoly(field, [rng.randrange(field.p) for _ in range(d + 1)])


def random_roabp(
    field: Field,
    n: int,
    d: int,
    w: int,
    seed: int,
    ensure_nonzero: bool = False,
) -> Roabp:
    """Uniformly random layer coefficients; reproducible for a fixed seed.

    With ensure_nonzero, resample until a random evaluation is nonzero: a
    nonzero value is already a certificate that the polynomial is nonzero,
    and each trial on a nonzero program misses with probability below
    deg/p (Schwartz-Zippel).
    """
    if n < 1 or d < 0 or w < 1:
        raise ValueError("need n >= 1, d >= 0, w >= 1")
    rng = random.Random(seed)
    while True:
        layers = []
        for i in range(n):
            rows = 1 if i == 0 else w
            cols = 1 if i == n - 1 else w
            layers.append(
                [[_rand_poly(rng, field, d) for _ in range(cols)] for _ in range(rows)]
            )
        a = Roabp(field, layers)
        if not ensure_nonzero:
            return a
        for _ in range(8):
            point = [field.rand(rng) for _ in range(n)]
            if int(a.eval(point)):
                return a


def random_commutative_roabp(
    field: Field,
    n: int,
    d: int,
    w: int,
    seed: int,
    ensure_nonzero: bool = False,
) -> Roabp:
    """Random program over the diagonal matrix algebra, in U,T form."""
    if n < 1 or d < 0 or w < 1:
        raise ValueError("need n >= 1, d >= 0, w >= 1")
    rng = random.Random(seed)
    zero = UniPoly.zero(field)
    while True:
        squares = []
        for _ in range(n):
            diag = [_rand_poly(rng, field, d) for _ in range(w)]
            squares.append(
                [[diag[i] if i == j else zero for j in range(w)] for i in range(w)]
            )
        u = [rng.randrange(field.p) for _ in range(w)]
        t = [rng.randrange(field.p) for _ in range(w)]
        a = Roabp.from_ut(field, u, squares, t)
        if not ensure_nonzero:
            return a
        for _ in range(8):
            point = [field.rand(rng) for _ in range(n)]
            if int(a.eval(point)):
                return a


@dataclass(frozen=True)
class LinearForm:
    """An affine form over one block: const + sum of coeff * x_var."""

    const: int
    coeffs: tuple  # ((var_index, coefficient), ...) ascending by variable

    def variables(self):
        return [v for v, _ in self.coeffs]

    def to_unipoly(self, field: Field, var: int) -> UniPoly:
        c = dict(self.coeffs)
        return UniPoly(field, [self.const, c.get(var, 0)])


class SetMultilinearCircuit:
    """Sum of k products of affine forms over disjoint variable blocks."""

    def __init__(self, field: Field, n: int, blocks, linears):
        self.field = field
        self.n = n
        self.blocks = tuple(tuple(b) for b in blocks)
        self.linears = tuple(tuple(row) for row in linears)
        seen = set()
        for b in self.blocks:
            for v in b:
                if v in seen:
                    raise PartitionError("variable x%d appears in two blocks" % v)
                if not 0 <= v < n:
                    raise PartitionError("variable x%d out of range" % v)
                seen.add(v)
        if seen != set(range(n)):
            raise PartitionError("blocks must partition all %d variables" % n)
        self.k = len(self.linears)
        for row in self.linears:
            if len(row) != len(self.blocks):
                raise PartitionError("each product needs one form per block")
        for row in self.linears:
            for j, form in enumerate(row):
                extra = set(form.variables()) - set(self.blocks[j])
                if extra:
                    raise PartitionError(
                        "form for block %d uses foreign variables %s" % (j, sorted(extra))
                    )

    def expand(self) -> SparseMultiPoly:
        """Direct circuit expansion, the independent oracle path."""
        total = SparseMultiPoly.zero(self.field, self.n)
        for row in self.linears:
            prod = SparseMultiPoly.constant(self.field, self.n, 1)
            for j, form in enumerate(row):
                terms = {(0,) * self.n: form.const}
                for v, c in form.coeffs:
                    e = [0] * self.n
                    e[v] = 1
                    terms[tuple(e)] = c
                prod = prod * SparseMultiPoly(self.field, self.n, terms)
            total = total + prod
        return total


def from_set_multilinear(circuit: SetMultilinearCircuit) -> Roabp:
    """Width-k commutative ROABP with diagonal coefficient matrices.

    Each block must hold exactly one variable: a diagonal of affine forms
    over a multi-variable block has no factorization into univariate
    diagonal layers, so such circuits are handled on the concentration
    path instead (see concentration.algebra_poly_from_set_multilinear).
    """
    field = circuit.field
    for b in circuit.blocks:
        if len(b) != 1:
            raise PartitionError(
                "width-k diagonal conversion needs one variable per block; "
                "block %s has %d" % (list(b), len(b))
            )
    order = tuple(b[0] for b in circuit.blocks)
    k = circuit.k
    zero = UniPoly.zero(field)
    squares = []
    for j, b in enumerate(circuit.blocks):
        var = b[0]
        diag = [circuit.linears[i][j].to_unipoly(field, var) for i in range(k)]
        squares.append([[diag[i] if i == j2 else zero for j2 in range(k)] for i in range(k)])
    ones = [1] * k
    return Roabp.from_ut(field, ones, squares, ones, order=order)


def roabp_from_bivariate(pd_matrix) -> Roabp:
    """Width-rank(M) bivariate program from a rank factorization M = A B.

    Columns of A give the x1-side factors, rows of B the x2-side factors;
    the zero matrix yields a degenerate width-1 zero program.
    """
    field = pd_matrix.field
    rows = [list(r) for r in pd_matrix.rows]
    echelon, pivots = rref(rows, field)
    r = len(pivots)
    if r == 0:
        z = UniPoly.zero(field)
        return Roabp(field, [[[z]], [[z]]])
    d1 = len(rows) - 1
    a_cols = [[rows[i][c] for i in range(d1 + 1)] for c in pivots]
    b_rows = echelon[:r]
    g = [UniPoly(field, col) for col in a_cols]
    h = [UniPoly(field, row) for row in b_rows]
    first = [list(g)]
    last = [[hr] for hr in h]
    return Roabp(field, [first, last])
