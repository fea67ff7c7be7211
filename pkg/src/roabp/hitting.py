"""Known-order hitting sets via the recursive polynomial map.

The building block sends a variable pair to (t^w, t^w + t^{w-1}); applied
along the known order it halves the variable count while preserving
nonzeroness, provided the field characteristic is zero-like (larger than
every degree in play).  log2(n) rounds collapse the program to a nonzero
univariate of degree at most n*d*w^ceil(log2 n), and that many evaluation
points plus one form the hitting set.

The map needs the variable order; it makes no promise for unknown-order
programs.  ``conjecture_probe`` explores the single-exponent family
(t^r, (t+1)^r, ..., (t+n-1)^r) as a candidate order-oblivious map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .algebra import Field, UniPoly, as_residue, ceil_log2, next_prime, poly_compose
from .errors import CharacteristicError, ShapeError
from .model import Roabp

DEFAULT_PROBE_EVAL_BUDGET = 64


class PolyTuple:
    """A tuple of univariate polynomials in one shared fresh variable."""

    __slots__ = ("field", "entries")

    def __init__(self, field: Field, entries):
        entries = tuple(entries)
        for e in entries:
            if not isinstance(e, UniPoly) or e.field != field:
                raise ShapeError("tuple entries must be UniPoly over one field context")
        self.field = field
        self.entries = entries

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other):
        return (
            isinstance(other, PolyTuple)
            and other.field == self.field
            and other.entries == self.entries
        )

    @property
    def max_degree(self) -> int:
        degs = [e.degree for e in self.entries if not e.is_zero]
        return max(degs) if degs else 0

    def eval_at(self, tau) -> tuple:
        tau = as_residue(tau, self.field)
        return tuple(e(tau) for e in self.entries)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.entries)

    def __repr__(self):
        return "PolyTuple(%s)" % ", ".join(repr(e) for e in self.entries)


@dataclass(frozen=True)
class HittingSet:
    points: tuple  # points as residue tuples
    meta: dict

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class PitResult:
    is_nonzero: bool
    witness: tuple | None
    points_checked: int

    @property
    def verdict(self) -> str:
        return "nonzero" if self.is_nonzero else "zero"


def bivariate_map(field: Field, w: int) -> PolyTuple:
    """(t^w, t^w + t^{w-1}); for w = 1 the second entry is t + 1."""
    if w < 1:
        raise ValueError("map parameter w must be at least 1")
    p0 = UniPoly.monomial(field, w)
    p1 = p0 + UniPoly.monomial(field, w - 1)
    return PolyTuple(field, (p0, p1))


def degree_bound(n: int, d: int, w: int) -> int:
    """n * d * w^ceil(log2 n), the degree of the collapsed univariate."""
    if n < 1:
        raise ValueError("need n >= 1")
    return n * d * (max(w, 1) ** ceil_log2(max(n, 1)))


def halving_transform(a: Roabp) -> Roabp:
    """One round of the pair map; n variables become n/2, width is kept.

    Requires an even variable count in identity order; callers pad first.
    Individual degree grows to at most 2*d*w.
    """
    if a.n % 2 != 0:
        raise ShapeError("halving needs an even variable count; pad with a constant layer")
    if a.order != tuple(range(a.n)):
        raise ShapeError("halving assumes the identity variable order")
    w = max(a.w, 1)
    pmap = bivariate_map(a.field, w)
    zero = UniPoly.zero(a.field)
    new_layers = []
    for i in range(a.n // 2):
        left = [[poly_compose(e, pmap[0]) for e in row] for row in a.layers[2 * i]]
        right = [[poly_compose(e, pmap[1]) for e in row] for row in a.layers[2 * i + 1]]
        cols = len(right[0])
        prod = [
            [
                _dot(row, [right[k][j] for k in range(len(right))], zero)
                for j in range(cols)
            ]
            for row in left
        ]
        new_layers.append(prod)
    return Roabp(a.field, new_layers)


def _dot(row, col, zero):
    acc = zero
    for x, y in zip(row, col):
        acc = acc + x * y
    return acc


def recursive_map(field: Field, n: int, w: int) -> PolyTuple:
    """Entry i composes the two base maps along the bits of i.

    Writing i as bits b_{log n} ... b_1 (most significant first), entry i is
    p_{b_1}(p_{b_2}(... p_{b_{log n}}(t))), so the innermost map is selected
    by the most significant bit.  Every entry has degree w^(log2 n).
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError("variable count must be a power of two; pad the program first")
    if w < 1:
        raise ValueError("map parameter w must be at least 1")
    rounds = ceil_log2(n) if n > 1 else 0
    base = bivariate_map(field, w)
    entries = []
    for i in range(n):
        cur = UniPoly.t(field)
        for level in range(rounds, 0, -1):
            bit = (i >> (level - 1)) & 1
            cur = poly_compose(base[bit], cur)
        entries.append(cur)
    return PolyTuple(field, entries)


def pad_variables(a: Roabp, target_n: int) -> Roabp:
    """Append constant 1x1 one-layers reading fresh dummy variables.

    The appended layers chain after the final column layer and leave the
    computed polynomial untouched, so padding to an even or power-of-two
    variable count never changes zeroness.
    """
    if target_n < a.n:
        raise ShapeError("cannot pad down from %d to %d variables" % (a.n, target_n))
    if target_n == a.n:
        return a
    one = UniPoly.one(a.field)
    layers = [list(list(r) for r in layer) for layer in a.layers]
    order = list(a.order)
    for extra in range(a.n, target_n):
        layers.append([[one]])
        order.append(extra)
    return Roabp(a.field, layers, order=tuple(order))


def hitting_set_known_order(
    n: int,
    d: int,
    w: int,
    field: Field | None = None,
    allow_small_field: bool = False,
) -> HittingSet:
    """Evaluations of the recursive map at 0..degree_bound.

    Any nonzero program in the standard order with parameters at most
    (n, d, w) is nonzero on at least one point, provided p exceeds the
    degree bound.  With allow_small_field the set degrades to the residues
    that exist; that run documents failures, it proves nothing.
    """
    bound = degree_bound(n, d, w)
    if field is None:
        field = Field(next_prime(bound))
    if field.p <= bound and not allow_small_field:
        raise CharacteristicError(
            "field modulus %d is too small; the construction needs p > %d"
            % (field.p, bound),
            required=bound + 1,
        )
    npow = 1 << ceil_log2(n)
    phi = recursive_map(field, npow, max(w, 1))
    taus = range(min(bound + 1, field.p))
    points = tuple(tuple(phi[i](tau) for i in range(n)) for tau in taus)
    if not allow_small_field and len(set(points)) != len(points):
        raise ValueError("hitting points collided; use a larger prime")
    return HittingSet(
        points,
        meta={
            "kind": "known-order",
            "n": n,
            "d": d,
            "w": w,
            "degree_bound": bound,
            "prime": field.p,
        },
    )


def blackbox_pit_known_order(
    oracle,
    n: int,
    d: int,
    w: int,
    field: Field | None = None,
    allow_small_field: bool = False,
) -> PitResult:
    """Sound and complete identity test for the known-order class.

    The oracle is any callable from an n-point to a value; it is queried on
    the hitting set only, so third-party blackboxes work as well as Roabp
    values do.
    """
    hs = hitting_set_known_order(n, d, w, field=field, allow_small_field=allow_small_field)
    f = field if field is not None else Field(hs.meta["prime"])
    for pt in hs.points:
        if as_residue(oracle(pt), f):
            return PitResult(True, pt, len(hs.points))
    return PitResult(False, None, len(hs.points))


@dataclass(frozen=True)
class ConjectureReport:
    r_max: int
    per_r: tuple  # (r, nonzero, witness tau or None)
    instance_nonzero: bool | None
    candidate_counterexample: bool
    details: dict = dc_field(default_factory=dict)

    @property
    def any_nonzero(self) -> bool:
        return any(nz for _, nz, _ in self.per_r)

    def first_hit(self):
        for r, nz, tau in self.per_r:
            if nz:
                return r, tau
        return None


def conjecture_probe(a: Roabp, r_max: int, term_cap: int = 1_000_000) -> ConjectureReport:
    """Substitute x_i by (t + i)^r for r = 1..r_max and certify each verdict.

    The substituted univariate has degree at most n*d*r, so evaluating it at
    n*d*r + 1 distinct points decides its zeroness exactly.  A nonzero
    program that stays zero for every probed r is flagged as a candidate
    counterexample rather than an error.
    """
    field = a.field
    n, d = a.n, a.d
    need = n * d * r_max
    if field.p <= need:
        raise CharacteristicError(
            "field modulus %d is too small; the probe needs p > %d" % (field.p, need),
            required=need + 1,
        )
    p = field.p
    per_r = []
    for r in range(1, r_max + 1):
        points = n * d * r + 1
        hit = None
        for tau in range(points):
            pt = tuple(pow((tau + i) % p, r, p) for i in range(n))
            if int(a.eval(pt)):
                hit = tau
                break
        per_r.append((r, hit is not None, hit))
    try:
        instance_nonzero = not a.expand(term_cap).is_zero
    except Exception:
        rng = random.Random(0)
        instance_nonzero = any(
            int(a.eval([field.rand(rng) for _ in range(n)]))
            for _ in range(DEFAULT_PROBE_EVAL_BUDGET)
        ) or None
    any_nz = any(nz for _, nz, _ in per_r)
    return ConjectureReport(
        r_max=r_max,
        per_r=tuple(per_r),
        instance_nonzero=instance_nonzero,
        candidate_counterexample=bool(instance_nonzero) and not any_nz,
    )
