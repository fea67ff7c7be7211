import math
import random
from itertools import combinations

import pytest

from roabp.algebra import Field, UniPoly, rank_ff_t_prefix
from roabp.concentration import (
    AlgebraPoly,
    BiPoly,
    ShiftFamily,
    WeightAssignment,
    algebra_poly_from_layers,
    algebra_poly_from_roabp,
    algebra_poly_from_set_multilinear,
    check_basis_isolating,
    coefficient_rank,
    collapse_y,
    commutative_blackbox_pit,
    commutative_shift,
    concentrated_hitting_set,
    concentration_target,
    expand_shifted,
    is_l_concentrated,
    lagrange_tuple,
    search_isolating,
    shift_layers,
    shift_roabp,
    shifted_algebra_poly,
)
from roabp.errors import CharacteristicError, ShapeError
from roabp.hitting import PolyTuple
from roabp.model import (
    LinearForm,
    Roabp,
    SetMultilinearCircuit,
    random_commutative_roabp,
    random_roabp,
)

F101 = Field(101)
F10007 = Field(10007)


def poly_tuple_of_consts(field, values):
    return PolyTuple(field, tuple(UniPoly.constant(field, v) for v in values))


def tpow_tuple(field, weights):
    return WeightAssignment(weights).shift_tuple(field)


def product_program(field, n):
    x = UniPoly.t(field)
    return Roabp(field, [[[x]] for _ in range(n)])


def substituted_scalar_oracle(f, shift):
    """f(x + shift) as exponent -> UniPoly, built independently of shift_layers."""
    field = f.field
    out = {}
    for e, c in f.terms.items():
        acc = {(0,) * f.n: UniPoly.constant(field, c)}
        for i, a in enumerate(e):
            if not a:
                continue
            s = shift[i]
            nxt = {}
            for b in range(a + 1):
                factor = (s ** (a - b)) * math.comb(a, b)
                for exp0, poly0 in acc.items():
                    ne = list(exp0)
                    ne[i] += b
                    ne = tuple(ne)
                    add = poly0 * factor
                    nxt[ne] = nxt.get(ne, UniPoly.zero(field)) + add
            acc = nxt
        for exp0, poly0 in acc.items():
            out[exp0] = out.get(exp0, UniPoly.zero(field)) + poly0
    return {e: v for e, v in out.items() if not v.is_zero}


def test_shift_by_zero_tuple_is_identity():
    a = random_roabp(F101, 3, 2, 2, seed=1)
    zero_shift = tpow_tuple(F101, (0, 0, 0))
    # t^0 = 1 is not the zero shift; build the actual zero tuple
    zshift = PolyTuple(F101, tuple(UniPoly.zero(F101) for _ in range(3)))
    d_plain = shifted_algebra_poly(a, zshift, square=False)
    f = a.expand()
    assert d_plain.kind == "int"
    assert d_plain.scalar_terms() == f.terms


def test_shift_all_ones_on_product_has_unit_constant_term():
    n = 4
    a = product_program(F101, n)
    ones = poly_tuple_of_consts(F101, (1,) * n)
    shifted = shifted_algebra_poly(a, ones, square=False)
    scalar = shifted.scalar_terms()
    const = scalar[(0,) * n]
    assert const == UniPoly.one(F101)
    assert is_l_concentrated(shifted, 1)


def test_shift_matches_substitution_oracle():
    rng = random.Random(9)
    for trial in range(15):
        n = rng.randrange(2, 4)
        a = random_roabp(F101, n, 2, 2, seed=50 + trial)
        shift = PolyTuple(
            F101,
            tuple(
                UniPoly(F101, [rng.randrange(101) for _ in range(rng.randrange(1, 3))])
                for _ in range(n)
            ),
        )
        got = shifted_algebra_poly(a, shift, square=False)
        expected = substituted_scalar_oracle(a.expand(), list(shift))
        if got.kind == "int":
            assert {e: v[0] for e, v in got.terms.items()} == {
                e: v.coeffs[0] for e, v in expected.items()
            }
        else:
            assert got.scalar_terms() == expected


def test_shift_shape_error():
    a = random_roabp(F101, 3, 1, 2, seed=3)
    with pytest.raises(ShapeError):
        shift_roabp(a, tpow_tuple(F101, (1, 1)))


def test_shift_preserves_zero_status():
    rng = random.Random(13)
    for trial in range(20):
        a = random_roabp(F101, 3, 1, 2, seed=800 + trial)
        f = a.expand()
        shift = tpow_tuple(F101, tuple(rng.randrange(3) for _ in range(3)))
        shifted = shifted_algebra_poly(a, shift, square=False)
        assert shifted.is_zero == f.is_zero


def test_is_l_concentrated_pins():
    n = 3
    onepx_layers = [[[UniPoly(F101, [1, 1])]] for _ in range(n)]
    a = Roabp(F101, onepx_layers)
    d_poly = algebra_poly_from_layers(F101, a.layers)
    assert is_l_concentrated(d_poly, 1)

    prod = product_program(F101, 2)
    d_prod = algebra_poly_from_layers(F101, prod.layers)
    assert not is_l_concentrated(d_prod, 2)

    ones = poly_tuple_of_consts(F101, (1, 1))
    shifted = shifted_algebra_poly(prod, ones, square=False)
    assert is_l_concentrated(shifted, 1)

    zero = AlgebraPoly(F101, 2, 1, {}, "int")
    for l in (1, 2, 5):
        assert is_l_concentrated(zero, l)


def test_concentration_target():
    assert concentration_target(1) == 1
    assert concentration_target(4) == 3
    assert concentration_target(3) == 2
    with pytest.raises(ValueError):
        concentration_target(0)


def test_check_basis_isolating_pins():
    D = AlgebraPoly(F101, 2, 1, {(1, 0): (1,), (0, 1): (1,)}, "int")
    ok, s = check_basis_isolating(D, WeightAssignment((0, 1)))
    assert ok and s == [(1, 0)]
    # a same-weight tie fails the default rule even when dependent:
    # spanning members must be strictly lighter
    ok, _ = check_basis_isolating(D, WeightAssignment((0, 0)))
    assert not ok
    # the opt-in 'updated' rule accepts the dependent tie
    ok, s = check_basis_isolating(D, WeightAssignment((0, 0)), tie_rule="updated")
    assert ok and s == [(1, 0)]


def test_updated_tie_rule_cancellation_boundary():
    # why 'strict' is the default: x1 - x2 passes the updated sweep with the
    # all-zero weights, but the resulting constant shift cancels the witness
    D = AlgebraPoly(F101, 2, 1, {(1, 0): (1,), (0, 1): (100,)}, "int")
    ok, _ = check_basis_isolating(D, WeightAssignment((0, 0)), tie_rule="updated")
    assert ok
    assert not check_basis_isolating(D, WeightAssignment((0, 0)))[0]
    x = UniPoly.t(F101)
    one = UniPoly.one(F101)
    neg_x = UniPoly(F101, [0, 100])
    a = Roabp(F101, [[[x, one]], [[one], [neg_x]]])
    shifted = shifted_algebra_poly(a, tpow_tuple(F101, (0, 0)), square=False)
    assert not is_l_concentrated(shifted, 1)


def test_check_basis_isolating_diagonal_pair():
    D = AlgebraPoly(
        F101, 2, 2, {(0, 0): (1, 1), (1, 0): (1, 0), (0, 1): (0, 1)}, "int"
    )
    ok, s = check_basis_isolating(D, WeightAssignment((1, 2)))
    assert ok and s == [(0, 0), (1, 0)]


def test_search_isolating_pins():
    # independent diagonal coefficients: first isolating vector is (0, 1)
    D = AlgebraPoly(F101, 2, 2, {(1, 0): (1, 0), (0, 1): (0, 1)}, "int")
    assert search_isolating(D) == WeightAssignment((0, 1))
    # all coefficients on one line: the relaxed rule takes the all-zero
    # assignment, the default needs weights separating the monomials
    D1 = AlgebraPoly(F101, 2, 1, {(1, 0): (2,), (0, 1): (3,)}, "int")
    assert search_isolating(D1, tie_rule="updated") == WeightAssignment((0, 0))
    assert search_isolating(D1) == WeightAssignment((0, 1))
    # single-variable pins: w = (1) always isolates a univariate; the
    # all-zero weight isolates exactly the single-monomial polynomials
    Dx = AlgebraPoly(F101, 1, 1, {(1,): (1,), (0,): (100,)}, "int")
    assert check_basis_isolating(Dx, WeightAssignment((1,)))[0]
    assert search_isolating(Dx) == WeightAssignment((1,))
    Dmono = AlgebraPoly(F101, 1, 1, {(2,): (5,)}, "int")
    assert search_isolating(Dmono) == WeightAssignment((0,))
    # the zero polynomial is isolated by anything
    assert search_isolating(AlgebraPoly(F101, 2, 1, {}, "int")) == WeightAssignment((0, 0))


def test_search_isolating_none_when_box_too_small():
    # force failure: independent coefficients need weight 1 somewhere
    D = AlgebraPoly(F101, 2, 2, {(1, 0): (1, 0), (0, 1): (0, 1)}, "int")
    assert search_isolating(D, max_weight=0) is None


def test_isolation_implies_concentration_keystone():
    rng = random.Random(20250808)
    for trial in range(30):
        n, d = 4, rng.choice((1, 2))
        w = rng.choice((1, 2))
        a = random_commutative_roabp(F10007, n, d, w, seed=71000 + trial, ensure_nonzero=True)
        D = algebra_poly_from_roabp(a)
        wa = search_isolating(D, max_weight=n * (d + 1))
        assert wa is not None
        shifted = shifted_algebra_poly(a, wa.shift_tuple(F10007))
        assert is_l_concentrated(shifted, concentration_target(w * w))


def test_impossibility_floor():
    # 4 independent coefficients cannot be spanned by the 3 low-support ones
    one = UniPoly.one(F101)
    zero = UniPoly.zero(F101)
    x = UniPoly.t(F101)
    e12 = [[one, x], [zero, one]]
    e21 = [[one, zero], [x, one]]
    layers = [e12, e21]
    D = algebra_poly_from_layers(F101, layers)
    assert coefficient_rank(D) == 4
    assert not is_l_concentrated(D, 2)
    rng = random.Random(5)
    shifts = [tpow_tuple(F101, (a, b)) for a, b in ((1, 2), (2, 1), (3, 5))]
    shifts += [
        PolyTuple(F101, (UniPoly(F101, [rng.randrange(101) for _ in range(3)]),
                         UniPoly(F101, [rng.randrange(101) for _ in range(3)])))
        for _ in range(5)
    ]
    for sh in shifts:
        shifted = expand_shifted(F101, shift_layers(F101, layers, list(sh)))
        assert not is_l_concentrated(shifted, 2)


def test_subcircuit_concentration_implies_whole():
    # commutative product over 5 variables: if every 3-subset subproduct is
    # 3-concentrated under the shift, the full product is too
    rng = random.Random(31)
    checked = 0
    for trial in range(8):
        a = random_commutative_roabp(F10007, 5, rng.choice((1, 2)), 2,
                                     seed=90000 + trial, ensure_nonzero=True)
        _, squares, _ = a.square_form()
        D = algebra_poly_from_roabp(a)
        wa = search_isolating(D, max_weight=5 * 3)
        if wa is None:
            continue
        shift = wa.shift_tuple(F10007)
        l = concentration_target(4)
        all_subs_ok = True
        for subset in combinations(range(5), l):
            sub_layers = [squares[i] for i in subset]
            sub_shift = [shift[i] for i in subset]
            shifted = expand_shifted(
                F10007, shift_layers(F10007, sub_layers, sub_shift)
            )
            if not is_l_concentrated(shifted, l):
                all_subs_ok = False
                break
        if not all_subs_ok:
            continue
        checked += 1
        whole = shifted_algebra_poly(a, shift)
        assert is_l_concentrated(whole, l)
    assert checked >= 4


def test_lagrange_single_member():
    f1 = tpow_tuple(F101, (1, 2))
    fam = ShiftFamily([f1], nodes=[3])
    L = lagrange_tuple(fam)
    for j in range(2):
        assert L[j].deg_y <= 0
        assert L[j].eval_y(0) == f1[j]


def test_lagrange_two_members_pinned_formula():
    f1 = poly_tuple_of_consts(F101, (2, 3))
    f2 = tpow_tuple(F101, (1, 1))
    fam = ShiftFamily([f1, f2], nodes=[0, 1])
    L = lagrange_tuple(fam)
    # L_j = f1_j (1 - y) + f2_j y
    y = BiPoly.y(F101)
    for j in range(2):
        expected = (BiPoly.constant(F101, 1) - y) * BiPoly.from_unipoly_t(f1[j]) + y * BiPoly.from_unipoly_t(f2[j])
        assert L[j] == expected


def test_lagrange_reproduces_members():
    rng = random.Random(17)
    tuples = [
        PolyTuple(
            F101,
            tuple(UniPoly(F101, [rng.randrange(101) for _ in range(3)]) for _ in range(3)),
        )
        for _ in range(3)
    ]
    fam = ShiftFamily(tuples, nodes=[2, 5, 9])
    L = lagrange_tuple(fam)
    for i, node in enumerate(fam.nodes):
        for j in range(3):
            assert L[j].eval_y(node) == tuples[i][j]
    for j in range(3):
        assert L[j].deg_y <= len(tuples) - 1


def test_lagrange_duplicate_nodes_rejected():
    f1 = tpow_tuple(F101, (1,))
    with pytest.raises(ValueError):
        ShiftFamily([f1, f1], nodes=[4, 4])


def test_collapse_pins():
    c = BiPoly.constant(F101, 7) + BiPoly.from_unipoly_t(UniPoly.t(F101))
    out = collapse_y([c], 10)
    assert out[0] == UniPoly(F101, [7, 1])
    y_only = BiPoly.y(F101)
    out = collapse_y([y_only], 4)
    assert out[0] == UniPoly.monomial(F101, 5)
    with pytest.raises(ValueError):
        collapse_y([y_only], 3, bound=4)


def test_interpolation_preserves_low_support_rank():
    # rank over F(y, t) of the low-support stack is at least the rank at any
    # member specialization y = alpha_i
    rng = random.Random(23)
    for trial in range(6):
        a = random_commutative_roabp(F10007, 3, 1, 2, seed=61000 + trial, ensure_nonzero=True)
        good = tpow_tuple(F10007, (1, 2, 2))
        bad = poly_tuple_of_consts(F10007, (0, 0, 0))
        fam = ShiftFamily([bad, good], nodes=[4, 9])
        L = lagrange_tuple(fam)
        l = concentration_target(4)
        shifted_l = shifted_algebra_poly(a, L)
        assert shifted_l.kind == "bipoly"
        low = [v for e, v in shifted_l.terms.items() if sum(1 for x in e if x) < l]
        rows = [[vec[i] for vec in low] for i in range(shifted_l.dim)]
        dt = max((e.deg_t for r in rows for e in r if not e.is_zero), default=0)
        m = min(len(rows), len(rows[0]) if rows else 0) * dt + 1
        uni_rows = [[e.subst_y_tpow(m) for e in r] for r in rows]
        _, rank_yt = rank_ff_t_prefix(uni_rows, 0)
        for member in fam.tuples:
            specialized = shifted_algebra_poly(a, member)
            low_s = [v for e, v in specialized.terms.items() if sum(1 for x in e if x) < l]
            if not low_s:
                continue
            if specialized.kind == "int":
                from roabp.algebra import rank_ff
                rank_at_node = rank_ff([[vec[i] for vec in low_s] for i in range(specialized.dim)], F10007)
            else:
                rows_s = [[vec[i] for vec in low_s] for i in range(specialized.dim)]
                _, rank_at_node = rank_ff_t_prefix(rows_s, 0)
            assert rank_yt >= rank_at_node


def test_commutative_shift_concentrates_width2():
    rng = random.Random(29)
    for trial in range(5):
        a = random_commutative_roabp(F10007, 4, 2, 2, seed=41000 + trial, ensure_nonzero=True)
        D = algebra_poly_from_roabp(a)
        wa = search_isolating(D, max_weight=12)
        assert wa is not None
        fam = ShiftFamily([wa.shift_tuple(F10007)], nodes=[0])
        shift = commutative_shift(F10007, 4, 2, 2, fam)
        shifted = shifted_algebra_poly(a, shift)
        assert is_l_concentrated(shifted, concentration_target(4))


def test_commutative_shift_width1_constant_term():
    a = product_program(F10007, 3)
    fam = ShiftFamily([tpow_tuple(F10007, (1, 1, 1))], nodes=[0])
    shift = commutative_shift(F10007, 3, 1, 1, fam, k=1)
    shifted = shifted_algebra_poly(a, shift, square=False)
    assert is_l_concentrated(shifted, 1)


def test_concentrated_hitting_set_l1_is_shift_curve():
    shift = tpow_tuple(F10007, (1, 2))
    hs = concentrated_hitting_set(F10007, 2, 1, 1, shift, 3)
    assert hs.points == tuple(shift.eval_at(tau) for tau in range(4))


def test_concentrated_hitting_set_pinned_enumeration():
    zshift = PolyTuple(F101, (UniPoly.zero(F101), UniPoly.zero(F101)))
    hs = concentrated_hitting_set(F101, 2, 1, 2, zshift, 0)
    assert len(hs.points) == 4
    assert hs.meta["size_formula"] == 4
    assert set(hs.points) == {(0, 0), (1, 0), (0, 1)}


def test_concentrated_hitting_set_size_formula():
    shift = tpow_tuple(F10007, (1, 2, 1, 3))
    t_degree = 5
    hs = concentrated_hitting_set(F10007, 4, 2, 3, shift, t_degree)
    expected = math.comb(4, 2) * 3 ** 2 * 6
    assert len(hs.points) == expected == hs.meta["size_formula"]


def test_concentrated_hitting_set_characteristic_guard():
    f3 = Field(3)
    shift = PolyTuple(f3, (UniPoly.zero(f3),))
    with pytest.raises(CharacteristicError):
        concentrated_hitting_set(f3, 1, 1, 1, shift, 10)


def test_commutative_pit_zero_oracle():
    fam = ShiftFamily([tpow_tuple(F10007, (1, 1, 1))], nodes=[0])
    res = commutative_blackbox_pit(lambda pt: 0, F10007, 3, 2, 2, fam)
    assert not res.is_nonzero


def test_commutative_pit_width1_product():
    n = 3
    a = product_program(F10007, n)
    fam = ShiftFamily([tpow_tuple(F10007, (1,) * n)], nodes=[0])
    res = commutative_blackbox_pit(a.eval, F10007, n, 1, 1, fam, k=1)
    assert res.is_nonzero


def test_commutative_pit_matches_ground_truth_minibatch():
    rng = random.Random(37)
    for trial in range(25):
        n = rng.choice((2, 3))
        d = rng.choice((1, 2))
        w = rng.choice((1, 2))
        a = random_commutative_roabp(F10007, n, d, w, seed=52000 + trial)
        truth = not a.expand().is_zero
        D = algebra_poly_from_roabp(a)
        wa = search_isolating(D, max_weight=n * (d + 1))
        assert wa is not None
        fam = ShiftFamily([wa.shift_tuple(F10007)], nodes=[0])
        res = commutative_blackbox_pit(a.eval, F10007, n, d, w, fam)
        assert res.is_nonzero == truth


def test_algebra_poly_from_set_multilinear_multivar_blocks():
    # blocks of width 2 work on the concentration path
    l11 = LinearForm(const=1, coeffs=((0, 2), (1, 3)))
    l12 = LinearForm(const=4, coeffs=((2, 5),))
    l21 = LinearForm(const=2, coeffs=((0, 1), (1, 1)))
    l22 = LinearForm(const=0, coeffs=((2, 7),))
    c = SetMultilinearCircuit(F101, 3, [(0, 1), (2,)], [[l11, l12], [l21, l22]])
    D = algebra_poly_from_set_multilinear(c)
    assert D.dim == 2
    # contracting against the all-ones vector reproduces the circuit value
    f = c.expand()
    total = {}
    for e, vec in D.terms.items():
        total[e] = sum(vec) % 101
    assert {e: v for e, v in total.items() if v} == f.terms
