"""Two-chart geometry of W_k: classification, splitting, cohomology."""

import pytest
from hypothesis import given, strategies as st

from ncbundles import (
    GLOBAL,
    OBSTRUCTION,
    U_ONLY,
    V_ONLY,
    Monomial,
    cech_split,
    classify,
    global_monomials,
    h1_obstruction_basis,
    parse_poly,
    to_U_chart,
    to_V_chart,
    v_exponent,
)
from ncbundles.geometry import is_global_poly

from conftest import laurent_polys

P = parse_poly


def test_v_exponent_values():
    assert v_exponent(Monomial(-1, 0, 1), 1) == 2
    assert v_exponent(Monomial(1, 0, 1), 2) == -1
    assert v_exponent(Monomial(-1, 0, 2), 3) == -1


def test_classify_examples():
    assert classify(Monomial(1, 1, 0), 1) == GLOBAL          # z*u1 on W_1
    assert classify(Monomial(3, 1, 0), 2) == U_ONLY          # z^3*u1 on W_2
    assert classify(Monomial(-1, 0, 2), 3) == OBSTRUCTION    # z^-1*u2^2 on W_3
    assert classify(Monomial(-2, 0, 1), 1) == V_ONLY


def test_to_v_chart_substitution():
    # u1 = xi * v1 on W_1
    assert to_V_chart(P("u1"), 1) == P("z*u1")
    # u2 = v2 on W_2
    assert to_V_chart(P("u2"), 2) == P("u2")


@given(laurent_polys(), st.integers(min_value=1, max_value=3))
def test_chart_round_trip(f, k):
    assert to_U_chart(to_V_chart(f, k), k) == f


@given(laurent_polys(), laurent_polys(), st.integers(min_value=1, max_value=3))
def test_to_v_chart_is_ring_morphism(f, g, k):
    assert to_V_chart(f * g, k) == to_V_chart(f, k) * to_V_chart(g, k)
    assert to_V_chart(f + g, k) == to_V_chart(f, k) + to_V_chart(g, k)


def test_cech_split_examples():
    fu, fv, rem = cech_split(P("z^-1*u1"), 1)
    assert fu.is_zero() and fv == P("z^-1*u1") and rem.is_zero()

    fu, fv, rem = cech_split(P("z^3*u1 + z^-1"), 2)
    assert fu == P("z^3*u1") and fv == P("z^-1") and rem.is_zero()

    fu, fv, rem = cech_split(P("z^-1*u2^2"), 3)
    assert fu.is_zero() and fv.is_zero() and rem == P("z^-1*u2^2")


def test_cech_split_global_tiebreak():
    # monomials holomorphic on both charts are assigned to the U part
    fu, fv, rem = cech_split(P("z*u1 + 5"), 1)
    assert fu == P("z*u1 + 5") and fv.is_zero() and rem.is_zero()


@given(laurent_polys(), st.integers(min_value=1, max_value=3))
def test_cech_split_exactness(f, k):
    fu, fv, rem = cech_split(f, k)
    assert fu + fv + rem == f
    for m in fu.monomials():
        assert m.l >= 0
    for m in fv.monomials():
        assert v_exponent(m, k) >= 0 and classify(m, k) != GLOBAL
    for m in rem.monomials():
        assert classify(m, k) == OBSTRUCTION
    if k in (1, 2):
        assert rem.is_zero()


def test_h1_basis_vanishes_low_k():
    assert h1_obstruction_basis(1, 6, 4, 6) == []
    assert h1_obstruction_basis(2, 6, 4, 6) == []


def test_h1_basis_k3_examples():
    mons = h1_obstruction_basis(3, 1, 1, 4)
    assert Monomial(-1, 0, 2) in mons
    assert Monomial(-1, 0, 3) in mons
    assert Monomial(-1, 0, 4) in mons
    assert all(m.l <= -1 and v_exponent(m, 3) <= -1 for m in mons)


def test_h1_basis_k3_growth_in_s():
    counts = [len(h1_obstruction_basis(3, 6, 4, s)) for s in range(1, 7)]
    assert all(b > a for a, b in zip(counts, counts[1:]))


def test_h1_basis_deterministic_order():
    mons = h1_obstruction_basis(3, 2, 2, 4)
    keys = [(m.i, m.s, m.l) for m in mons]
    assert keys == sorted(keys)


def test_global_monomials_frozen_lists():
    got1 = {m for m in global_monomials(1, max_u=1)}
    assert got1 == {Monomial(0, 0, 0), Monomial(0, 1, 0), Monomial(1, 1, 0),
                    Monomial(0, 0, 1), Monomial(1, 0, 1)}
    got2 = {m for m in global_monomials(2, max_u=1)}
    assert got2 == {Monomial(0, 0, 0), Monomial(0, 1, 0), Monomial(1, 1, 0),
                    Monomial(2, 1, 0), Monomial(0, 0, 1)}


def test_global_monomials_pure_z():
    pure = [m for m in global_monomials(1, max_u=0)]
    assert pure == [Monomial(0, 0, 0)]


def test_global_monomials_rejects_unknown_k():
    with pytest.raises(ValueError):
        global_monomials(3)


def test_is_global_poly():
    assert is_global_poly(P("2*u1 + 3*z*u2"), 1)
    assert not is_global_poly(P("z^-1"), 1)
    assert is_global_poly(P("z^2*u1"), 2)
    assert not is_global_poly(P("z*u2"), 2)
