import numpy as np
import pytest

from diffkit.errors import DomainMismatch, SizeExceeded
from diffkit.kernel import add, compose, identity, pair, projection, zero_map
from diffkit.models import get_model
from diffkit.morphisms import (
    Auto,
    EqualityStrategy,
    Exhaustive,
    Morphism,
    Sampled,
    from_table,
    morphisms_equal,
    strategy_for,
    tabulate,
)
from diffkit.spaces import (
    CyclicGroup,
    Real,
    encode,
    enumerate_space,
    sample_space,
)

Z5 = CyclicGroup(5)
Z7 = CyclicGroup(7)
EX = EqualityStrategy(Exhaustive())


def test_identity_equals_identity():
    assert morphisms_equal(identity(Z5), identity(Z5), EX).passed


def test_same_function_different_build():
    sq = Morphism(Z7, Z7, lambda x: (x * x) % 7)
    xx = Morphism(Z7, Z7, lambda x: (x * x) % 7, name="x*x")
    assert morphisms_equal(sq, xx, EX).passed


def test_counterexample_is_first_in_order():
    f = Morphism(CyclicGroup(2), CyclicGroup(2), lambda x: x)
    g = Morphism(CyclicGroup(2), CyclicGroup(2), lambda x: (x + 1) % 2)
    rep = morphisms_equal(f, g, EX)
    assert not rep.passed
    assert rep.counterexample["input"] == 0


def test_domain_mismatch_raises():
    with pytest.raises(DomainMismatch):
        morphisms_equal(identity(Z5), identity(Z7), EX)


def test_exhaustive_illegal_over_bound():
    big = CyclicGroup(11)
    f = Morphism(big, big, lambda x: x)
    with pytest.raises(SizeExceeded):
        morphisms_equal(f, f, EqualityStrategy(Exhaustive(), bound=10))


def test_equality_reflexive_symmetric_on_samples():
    fd = get_model("findiff")
    subs = fd.random_subjects(Z7, 4, seed=3)
    for f in subs:
        assert morphisms_equal(f, f, EX).passed
    for f, g in zip(subs, subs[1:]):
        assert (morphisms_equal(f, g, EX).passed
                == morphisms_equal(g, f, EX).passed)


def test_real_tolerances():
    r = Real(1)
    f = Morphism(r, r, lambda x: (x[0] * (1 + 1e-9),))
    g = Morphism(r, r, lambda x: (x[0],))
    ok = EqualityStrategy(Sampled(16, 1), abs_tol=1e-9, rel_tol=1e-6)
    tight = EqualityStrategy(Sampled(16, 1), abs_tol=0.0, rel_tol=1e-12)
    assert morphisms_equal(f, g, ok).passed
    assert not morphisms_equal(f, g, tight).passed


def test_auto_resolves_per_domain():
    assert isinstance(strategy_for(Z5).mode, Exhaustive)
    assert isinstance(strategy_for(Real(1)).mode, Sampled)
    auto = EqualityStrategy(Auto(8, 2), bound=3)
    assert isinstance(auto.resolve(Z5).mode, Sampled)  # 5 > bound 3
    assert isinstance(auto.resolve(CyclicGroup(2)).mode, Exhaustive)


def test_tables_mirror_closures():
    # the vectorized backend must agree with plain evaluation
    fd = get_model("findiff")
    f, g = fd.random_subjects(Z7, 2, seed=11)
    built = [
        compose(g, f),
        pair(f, g),
        add(f, g),
        fd.derivative(f),
        fd.derivative(fd.derivative(f)),
        fd.epsilon(g),
        zero_map(Z7, Z7),
        projection(0, Z7, Z5),
    ]
    for m in built:
        tbl = tabulate(m)
        assert tbl is not None
        for x in sample_space(m.dom, 25, seed=5):
            assert encode(m.cod, m(x)) == int(tbl[encode(m.dom, x)])


def test_from_table_round_trip():
    tbl = np.array([2, 0, 1], dtype=np.int64)
    m = from_table(CyclicGroup(3), CyclicGroup(3), tbl)
    assert [m(x) for x in enumerate_space(CyclicGroup(3))] == [2, 0, 1]


def test_table_and_closure_paths_agree_on_equality():
    fd = get_model("findiff")
    f, g = fd.random_subjects(Z7, 2, seed=23)
    df, dg = fd.derivative(f), fd.derivative(g)
    fast = morphisms_equal(df, dg, EX)
    pointwise = all(df(x) == dg(x) for x in enumerate_space(df.dom))
    assert fast.passed == pointwise
