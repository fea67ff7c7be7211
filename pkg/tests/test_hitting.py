import random

import pytest

from roabp.algebra import Field, SparseMultiPoly, UniPoly, poly_compose
from roabp.errors import CharacteristicError, ShapeError
from roabp.hitting import (
    bivariate_map,
    blackbox_pit_known_order,
    conjecture_probe,
    degree_bound,
    halving_transform,
    hitting_set_known_order,
    pad_variables,
    recursive_map,
)
from roabp.model import Roabp, random_roabp

F2 = Field(2)
F3 = Field(3)
F7 = Field(7)
F101 = Field(101)
F10007 = Field(10007)


def test_bivariate_map_pins():
    m = bivariate_map(F101, 2)
    assert m[0] == UniPoly(F101, [0, 0, 1])
    assert m[1] == UniPoly(F101, [0, 1, 1])
    m = bivariate_map(F101, 1)
    assert m[0] == UniPoly(F101, [0, 1])
    assert m[1] == UniPoly(F101, [1, 1])
    m = bivariate_map(F101, 3)
    assert m[0] == UniPoly(F101, [0, 0, 0, 1])
    assert m[1] == UniPoly(F101, [0, 0, 1, 1])
    with pytest.raises(ValueError):
        bivariate_map(F101, 0)


def test_degree_bound_pins():
    assert degree_bound(2, 1, 2) == 4
    assert degree_bound(4, 2, 2) == 32
    assert degree_bound(1, 5, 9) == 5
    assert degree_bound(3, 2, 2) == 24  # padding rounds log2(3) up


def test_recursive_map_n2_is_base_map():
    for w in (1, 2, 3):
        assert recursive_map(F101, 2, w).entries == bivariate_map(F101, w).entries


def test_recursive_map_pinned_n4_w2():
    phi = recursive_map(F101, 4, 2)
    assert phi[0] == UniPoly(F101, [0, 0, 0, 0, 1])            # t^4
    assert phi[1] == UniPoly(F101, [0, 0, 1, 0, 1])            # t^4 + t^2
    assert phi[2] == UniPoly(F101, [0, 0, 1, 2, 1])            # t^4 + 2t^3 + t^2
    assert phi[3] == UniPoly(F101, [0, 1, 2, 2, 1])            # t^4 + 2t^3 + 2t^2 + t
    for e in phi:
        assert e.degree == 4


def test_recursive_map_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        recursive_map(F101, 3, 2)


def test_recursive_map_matches_explicit_rounds():
    # applying the pair substitution round by round must agree symbolically
    field = Field(100003)
    for w in (1, 2, 3):
        base = bivariate_map(field, w)
        phi = recursive_map(field, 4, w)
        for i in range(4):
            inner = base[(i >> 1) & 1]
            outer = base[i & 1]
            assert phi[i] == poly_compose(outer, inner)


def test_halving_round_equals_substitution_oracle():
    rng = random.Random(51)
    for trial in range(25):
        w = rng.randrange(1, 3)
        d = rng.randrange(0, 3)
        a = random_roabp(F101, 4, d, w, seed=200 + trial)
        h = halving_transform(a)
        assert h.n == 2
        assert h.d <= 2 * max(d, 0) * max(a.w, 1) or h.d == 0
        pmap = bivariate_map(F101, max(a.w, 1))
        assignment = [(i // 2, pmap[i % 2]) for i in range(4)]
        expected = a.expand().substitute_per_variable(assignment, 2)
        assert h.expand() == expected


def test_halving_n2_matches_univariate_substitution():
    rng = random.Random(53)
    for trial in range(20):
        a = random_roabp(F101, 2, 2, 2, seed=400 + trial)
        h = halving_transform(a)
        assert h.n == 1
        pmap = bivariate_map(F101, max(a.w, 1))
        g = a.expand().substitute_all([pmap[0], pmap[1]])
        got = {e[0]: c for e, c in h.expand().terms.items()}
        assert got == {k: c for k, c in enumerate(g.coeffs) if c}


def test_halving_zero_stays_zero():
    z = UniPoly.zero(F101)
    a = Roabp(F101, [[[z, z]], [[z, z], [z, z]], [[z, z], [z, z]], [[z], [z]]])
    h = halving_transform(a)
    assert h.expand().is_zero


def test_halving_nonzero_survives():
    for trial in range(30):
        a = random_roabp(F101, 4, 1, 2, seed=600 + trial, ensure_nonzero=True)
        h = halving_transform(a)
        assert not h.expand().is_zero


def test_halving_shape_errors():
    a = random_roabp(F101, 3, 1, 2, seed=1)
    with pytest.raises(ShapeError):
        halving_transform(a)
    padded = pad_variables(a, 4)
    assert halving_transform(padded).n == 2


def test_pad_variables_preserves_polynomial():
    a = random_roabp(F101, 3, 2, 2, seed=77)
    b = pad_variables(a, 4)
    fa, fb = a.expand(), b.expand()
    assert fb.n == 4
    assert {e[:3]: c for e, c in fb.terms.items()} == fa.terms
    assert all(e[3] == 0 for e in fb.terms)


def test_hitting_set_sizes():
    hs = hitting_set_known_order(2, 1, 2, field=F7)
    assert len(hs) == 5
    hs = hitting_set_known_order(4, 2, 2, field=F10007)
    assert len(hs) == 33
    assert len(set(hs.points)) == 33


def test_hitting_set_characteristic_error():
    with pytest.raises(CharacteristicError) as ei:
        hitting_set_known_order(4, 2, 2, field=F7)
    assert ei.value.required == 33


def test_hitting_set_pinned_hit():
    # f = x1 + x2 with the w = 2 map over Z_7: tau = 1 gives 1 + 2 = 3
    hs = hitting_set_known_order(2, 1, 2, field=F7)
    assert hs.points[1] == (1, 2)
    f = SparseMultiPoly(F7, 2, {(1, 0): 1, (0, 1): 1})
    assert f(hs.points[1]) == 3


def test_blackbox_pit_zero_oracle():
    res = blackbox_pit_known_order(lambda pt: 0, 3, 2, 2, field=F10007)
    assert not res.is_nonzero and res.witness is None


def test_blackbox_pit_full_product():
    n = 4
    a = Roabp(F10007, [[[UniPoly.t(F10007)]] for _ in range(n)])
    res = blackbox_pit_known_order(a.eval, n, 1, 1, field=F10007)
    assert res.is_nonzero


def test_blackbox_pit_hits_random_nonzero():
    for trial in range(50):
        a = random_roabp(F10007, 4, 2, 2, seed=6000 + trial, ensure_nonzero=True)
        res = blackbox_pit_known_order(a.eval, 4, 2, 2, field=F10007)
        assert res.is_nonzero


def test_char2_counterexample_documented():
    # f = x2^2 + x1^2 + x1 has width 2, but the map dies over Z_2
    f = SparseMultiPoly(F2, 2, {(0, 2): 1, (2, 0): 1, (1, 0): 1})
    res = blackbox_pit_known_order(
        lambda pt: f(pt), 2, 2, 2, field=F2, allow_small_field=True
    )
    assert not res.is_nonzero
    assert res.points_checked == 2


def test_monotonicity_spot_check():
    # a set for (4, 2, 2) hits smaller-parameter nonzero instances
    hs = hitting_set_known_order(4, 2, 2, field=F10007)
    rng = random.Random(61)
    for trial in range(100):
        n = rng.choice((2, 3, 4))
        d = rng.randrange(0, 3)
        w = rng.randrange(1, 3)
        a = random_roabp(F10007, n, d, w, seed=8000 + trial, ensure_nonzero=True)
        assert any(int(a.eval(pt[:n])) for pt in hs.points)


def test_probe_single_variable():
    a = Roabp(F101, [[[UniPoly.t(F101)]]])
    rep = conjecture_probe(a, 1)
    assert rep.per_r[0][1]
    assert not rep.candidate_counterexample


def test_probe_x1_minus_x2():
    # x1 - x2 maps to t - (t+1) = -1 at r = 1, so the very first tau hits
    one = UniPoly.one(F101)
    x = UniPoly.t(F101)
    neg_x = UniPoly(F101, [0, 100])
    a = Roabp(F101, [[[x, one]], [[one], [neg_x]]])
    # layers: [x1, 1] then column [1, -x2]: computes x1 - x2
    assert a.expand() == SparseMultiPoly(F101, 2, {(1, 0): 1, (0, 1): 100})
    rep = conjecture_probe(a, 2)
    assert rep.per_r[0] == (1, True, 0)


def test_probe_batch_no_counterexamples():
    found = 0
    for trial in range(50):
        a = random_roabp(F10007, 3, 2, 2, seed=9000 + trial, ensure_nonzero=True)
        rep = conjecture_probe(a, a.n * a.d * a.w)
        if rep.candidate_counterexample:
            found += 1
    assert found == 0


def test_probe_characteristic_guard():
    a = random_roabp(F7, 4, 2, 2, seed=4)
    with pytest.raises(CharacteristicError):
        conjecture_probe(a, 16)
