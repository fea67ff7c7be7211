"""Exact arithmetic kernels over a prime field.

Residues are stored as plain ints in [0, p).  ``Field`` carries the modulus,
validated prime at construction by a deterministic Miller-Rabin check.
``FieldElem`` wraps a single residue for operator-style use at API
boundaries; the hot paths below work on raw ints.

``UniPoly`` is a dense univariate polynomial with no trailing zero
coefficients, so degree queries are exact (the zero polynomial reports a
-inf sentinel degree).  ``SparseMultiPoly`` maps exponent vectors to nonzero
residues.

Rank routines: ``rank_ff`` is plain Gaussian elimination mod p.
``rank_ff_t`` is fraction-free (division-exact) elimination over F[t], so a
rank over the rational-function field F(t) is an exact certificate, never a
probabilistic claim.  ``eval_rank_prefilter`` gives the fast randomized
pre-check for callers that want one before paying for the exact run.
"""

from __future__ import annotations

import random

from .errors import FieldMismatchError

NEG_INF = float("-inf")

# Witnesses making Miller-Rabin deterministic for n < 3,317,044,064,679,887,385,961,981.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    """Deterministic primality check for moduli up to ~3.3e24."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if n >= _MR_DETERMINISTIC_LIMIT:
        raise ValueError("modulus %d is too large for the deterministic primality check" % n)
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    c = max(n + 1, 2)
    if c > 2 and c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 1 if c == 2 else 2
    return c


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


class Field:
    """A prime field context Z_p.  Immutable and shareable across threads."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError("field modulus must be prime, got %r" % (p,))
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Field(%d)" % self.p

    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.field != self:
                raise FieldMismatchError("element of %r used in %r" % (value.field, self))
            return value
        return FieldElem(self, value)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of zero in %r" % self)
        return pow(a, self.p - 2, self.p)

    def rand(self, rng: random.Random) -> int:
        return rng.randrange(self.p)


class FieldElem:
    """One residue tied to its field; full operator set, hashable."""

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = int(value) % field.p

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatchError("mixed field contexts %r / %r" % (self.field, other.field))
            return other.value
        if isinstance(other, int):
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.value - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, v - self.value)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.value * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, self.value * self.field.inv(v))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return FieldElem(self.field, v * self.field.inv(self.value))

    def __neg__(self):
        return FieldElem(self.field, -self.value)

    def __pow__(self, e: int):
        if e < 0:
            return FieldElem(self.field, pow(self.field.inv(self.value), -e, self.field.p))
        return FieldElem(self.field, pow(self.value, e, self.field.p))

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash((self.field.p, self.value))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return "FieldElem(%d mod %d)" % (self.value, self.field.p)


def as_residue(value, field: Field) -> int:
    """Normalize an int or FieldElem to a residue in [0, p)."""
    if isinstance(value, FieldElem):
        if value.field != field:
            raise FieldMismatchError("element of %r used in %r" % (value.field, field))
        return value.value
    return int(value) % field.p


def _strip(coeffs):
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n]


class UniPoly:
    """Dense univariate polynomial over a prime field, canonical form.

    coeffs[k] is the coefficient of t^k; the list never ends in a zero, and
    the zero polynomial is the empty tuple.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs):
        p = field.p
        self.field = field
        self.coeffs = tuple(_strip([int(c) % p for c in coeffs]))

    @classmethod
    def _make(cls, field, reduced):
        # Internal fast path: coefficients already reduced mod p.
        self = object.__new__(cls)
        self.field = field
        self.coeffs = tuple(_strip(reduced))
        return self

    @classmethod
    def zero(cls, field):
        return cls._make(field, [])

    @classmethod
    def one(cls, field):
        return cls._make(field, [1 % field.p])

    @classmethod
    def constant(cls, field, c):
        return cls(field, [c])

    @classmethod
    def t(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def monomial(cls, field, k, c=1):
        return cls(field, [0] * k + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other):
        if other.field != self.field:
            raise FieldMismatchError("mixed field contexts in polynomial arithmetic")

    def __add__(self, other):
        if isinstance(other, int):
            other = UniPoly.constant(self.field, other)
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        p = self.field.p
        res = list(a)
        for i, c in enumerate(b):
            res[i] = (res[i] + c) % p
        return UniPoly._make(self.field, res)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return UniPoly._make(self.field, [(p - c) % p for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, int):
            other = UniPoly.constant(self.field, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.field.p
            p = self.field.p
            return UniPoly._make(self.field, [a * c % p for a in self.coeffs])
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly.zero(self.field)
        p = self.field.p
        res = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    res[i + j] += ai * bj
        return UniPoly._make(self.field, [c % p for c in res])

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = UniPoly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __call__(self, x) -> int:
        x = as_residue(x, self.field)
        p = self.field.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        p = self.field.p
        rem = list(self.coeffs)
        dv = other.coeffs
        dd = len(dv) - 1
        inv_lead = self.field.inv(dv[-1])
        if len(rem) - 1 < dd:
            return UniPoly.zero(self.field), self
        quot = [0] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            q = c * inv_lead % p
            quot[k - dd] = q
            for i in range(dd + 1):
                rem[k - dd + i] = (rem[k - dd + i] - q * dv[i]) % p
        return UniPoly._make(self.field, quot), UniPoly._make(self.field, rem)

    def exact_div(self, other) -> "UniPoly":
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ArithmeticError("inexact polynomial division in fraction-free elimination")
        return q

    def __eq__(self, other):
        return (
            isinstance(other, UniPoly)
            and other.field == self.field
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.field.p, self.coeffs))

    def __repr__(self):
        if self.is_zero:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append("t" if c == 1 else "%d*t" % c)
            else:
                parts.append("t^%d" % k if c == 1 else "%d*t^%d" % (c, k))
        return " + ".join(parts)


def poly_compose(outer: UniPoly, inner: UniPoly) -> UniPoly:
    """outer(inner(t)), exact; degrees multiply when both are nonconstant."""
    if outer.field != inner.field:
        raise FieldMismatchError("compose over mixed field contexts")
    acc = UniPoly.zero(outer.field)
    for c in reversed(outer.coeffs):
        acc = acc * inner + c
    return acc


class SparseMultiPoly:
    """n-variate polynomial as a map from exponent vectors to nonzero residues."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: Field, n: int, terms=None):
        self.field = field
        self.n = n
        clean = {}
        p = field.p
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError("exponent vector %r has length != %d" % (exp, n))
            if any(e < 0 for e in exp):
                raise ValueError("negative exponent in %r" % (exp,))
            c = int(c) % p
            if c:
                clean[exp] = c
        self.terms = clean

    @classmethod
    def zero(cls, field, n):
        return cls(field, n)

    @classmethod
    def constant(cls, field, n, c):
        return cls(field, n, {(0,) * n: c})

    @classmethod
    def variable(cls, field, n, i, power=1):
        exp = [0] * n
        exp[i] = power
        return cls(field, n, {tuple(exp): 1})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def individual_degree(self) -> int:
        """Largest exponent of any single variable; 0 for the zero polynomial."""
        return max((max(e) for e in self.terms), default=0)

    def coeff(self, exp) -> int:
        return self.terms.get(tuple(exp), 0)

    def _check(self, other):
        if other.field != self.field:
            raise FieldMismatchError("mixed field contexts")
        if other.n != self.n:
            raise ValueError("mixed variable counts %d / %d" % (self.n, other.n))

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = (res.get(e, 0) + c) % p
            if v:
                res[e] = v
            else:
                res.pop(e, None)
        return SparseMultiPoly(self.field, self.n, res)

    def __neg__(self):
        p = self.field.p
        return SparseMultiPoly(self.field, self.n, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        p = self.field.p
        res = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                res[e] = (res.get(e, 0) + c1 * c2) % p
        return SparseMultiPoly(self.field, self.n, res)

    __rmul__ = __mul__

    def scale(self, c: int):
        c = int(c) % self.field.p
        return SparseMultiPoly(
            self.field, self.n, {e: v * c % self.field.p for e, v in self.terms.items()}
        )

    def __call__(self, point) -> int:
        if len(point) != self.n:
            raise ValueError("point length %d != %d variables" % (len(point), self.n))
        p = self.field.p
        vals = [as_residue(v, self.field) for v in point]
        total = 0
        for e, c in self.terms.items():
            m = c
            for i, a in enumerate(e):
                if a:
                    m = m * pow(vals[i], a, p) % p
            total = (total + m) % p
        return total

    def substitute_all(self, images) -> UniPoly:
        """Substitute every variable by a univariate in one shared variable."""
        if len(images) != self.n:
            raise ValueError("need one image per variable")
        field = self.field
        acc = UniPoly.zero(field)
        cache = {}
        for e, c in self.terms.items():
            term = UniPoly.constant(field, c)
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in cache:
                        cache[key] = images[i] ** a
                    term = term * cache[key]
            acc = acc + term
        return acc

    def substitute_per_variable(self, assignment, new_n: int) -> "SparseMultiPoly":
        """Substitute x_i by a univariate image living on a target variable.

        assignment[i] = (target_index, UniPoly); distinct source variables may
        share a target, which is how a variable-halving substitution is
        expressed.
        """
        if len(assignment) != self.n:
            raise ValueError("need one (target, image) pair per variable")
        field = self.field
        p = field.p
        result = {}
        cache = {}
        for e, c in self.terms.items():
            acc = {(0,) * new_n: c}
            for i, a in enumerate(e):
                if not a:
                    continue
                target, image = assignment[i]
                key = (i, a)
                if key not in cache:
                    cache[key] = (image ** a).coeffs
                img = cache[key]
                nxt = {}
                for exp, v in acc.items():
                    for k, ck in enumerate(img):
                        if not ck:
                            continue
                        ne = list(exp)
                        ne[target] += k
                        ne = tuple(ne)
                        nxt[ne] = (nxt.get(ne, 0) + v * ck) % p
                acc = nxt
            for exp, v in acc.items():
                result[exp] = (result.get(exp, 0) + v) % p
        return SparseMultiPoly(field, new_n, result)

    def __eq__(self, other):
        return (
            isinstance(other, SparseMultiPoly)
            and other.field == self.field
            and other.n == self.n
            and other.terms == self.terms
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(
                "x%d" % i if a == 1 else "x%d^%d" % (i, a) for i, a in enumerate(e) if a
            )
            if not mono:
                parts.append(str(c))
            else:
                parts.append(mono if c == 1 else "%d*%s" % (c, mono))
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Matrices as lists of rows; rank routines.
# ---------------------------------------------------------------------------


def identity_matrix(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b, p: int):
    """Product of int matrices mod p; shapes must chain."""
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shapes do not chain: %dx%d * %dx%d"
                         % (len(a), len(a[0]), len(b), len(b[0]) if b else 0))
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = [0] * cols
        for k, v in enumerate(row):
            if v:
                brow = b[k]
                for j in range(cols):
                    new[j] += v * brow[j]
        out.append([v % p for v in new])
    return out


def mat_mul_poly(a, b, zero):
    """Product of matrices whose entries support + and * (UniPoly, BiPoly)."""
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix shapes do not chain")
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = zero
            for k, v in enumerate(row):
                acc = acc + v * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def _rref_pivot_cols(rows, field: Field):
    """Gaussian elimination mod p; returns (echelon rows, pivot column list)."""
    p = field.p
    m = [[int(v) % p for v in r] for r in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    nr = len(m)
    nc = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pr = None
        for i in range(r, nr):
            if m[i][c]:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [v * inv % p for v in m[r]]
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                mi, mr = m[i], m[r]
                for j in range(c, nc):
                    mi[j] = (mi[j] - f * mr[j]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank_ff(rows, field: Field) -> int:
    """Exact rank of an int matrix over Z_p."""
    return len(_rref_pivot_cols(rows, field)[1])


def rank_ff_prefix(rows, field: Field, split: int):
    """(rank of the first `split` columns, rank of the whole matrix)."""
    _, pivots = _rref_pivot_cols(rows, field)
    return sum(1 for c in pivots if c < split), len(pivots)


def rref(rows, field: Field):
    """Reduced row echelon form and pivot columns, for rank factorizations."""
    return _rref_pivot_cols(rows, field)


def _bareiss_pivot_cols(rows):
    """Fraction-free elimination over F[t]; returns pivot column indices.

    Columns are processed left to right, so the pivots in a column prefix
    give the exact rank of that prefix.  All divisions are by the previous
    pivot and are exact (asserted), which keeps every verdict a certificate.
    """
    if not rows:
        return []
    field = rows[0][0].field if rows[0] else None
    m = [list(r) for r in rows]
    nc = len(m[0])
    for r in m:
        if len(r) != nc:
            raise ValueError("ragged matrix")
        for v in r:
            if v.field != field:
                raise FieldMismatchError("mixed field contexts in matrix")
    nr = len(m)
    pivots = []
    prev = None
    r = 0
    for c in range(nc):
        if r == nr:
            break
        pr = None
        for i in range(r, nr):
            if not m[i][c].is_zero:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        for i in range(r + 1, nr):
            mic = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, nc):
                v = piv * row_i[j] - mic * row_r[j]
                if prev is not None:
                    v = v.exact_div(prev)
                row_i[j] = v
            row_i[c] = UniPoly.zero(field)
        pivots.append(c)
        prev = piv
        r += 1
    return pivots


def rank_ff_t(rows) -> int:
    """Exact rank over F(t) of a matrix of UniPoly entries."""
    return len(_bareiss_pivot_cols(rows))


def rank_ff_t_prefix(rows, split: int):
    """(rank over F(t) of the first `split` columns, rank of the whole)."""
    pivots = _bareiss_pivot_cols(rows)
    return sum(1 for c in pivots if c < split), len(pivots)


def eval_rank_prefilter(rows, field: Field, rng: random.Random) -> int:
    """Rank of a UniPoly matrix specialized at one random t.

    Lower-bounds the rank over F(t); use only to skip exact runs early, the
    exact verdict still comes from rank_ff_t.
    """
    tau = field.rand(rng)
    return rank_ff([[v(tau) for v in r] for r in rows], field)
