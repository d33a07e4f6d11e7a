import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gframe.errors import GroupMismatchError
from gframe.group import FiniteAbelianGroup, as_group

import oracles

GROUPS = [[2], [3], [4], [2, 3], [2, 2], [3, 4]]


def test_mul_examples():
    z4 = FiniteAbelianGroup.cyclic(4)
    assert z4.mul(3, 2) == (1,)
    g = as_group([2, 3])
    assert g.mul((1, 2), (1, 2)) == (0, 1)
    for e in g.elements():
        assert g.mul(e, g.identity) == e


def test_inv_examples():
    z4 = as_group(4)
    assert z4.inv(1) == (3,)
    assert as_group(7).inv(0) == (0,)
    assert as_group([2, 3]).inv((1, 1)) == (1, 2)


def test_char_value_examples():
    assert np.isclose(as_group(4).char_value(1, 1), 1j)
    assert np.isclose(as_group(2).char_value(1, 1), -1)
    g = as_group([2, 3])
    for x in g.elements():
        assert g.char_value(g.identity, x) == 1


def test_enumeration_order():
    assert as_group(2).elements() == [(0,), (1,)]
    assert as_group(2).tuples(2) == [((0,), (0,)), ((0,), (1,)), ((1,), (0,)), ((1,), (1,))]
    assert as_group(3).characters() == [(0,), (1,), (2,)]
    assert as_group([2, 3]).elements()[:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert len(as_group(3).tuples(0)) == 1


@pytest.mark.parametrize("factors", GROUPS)
def test_index_roundtrip(factors):
    g = as_group(factors)
    for i, x in enumerate(g.elements()):
        assert g.index(x) == i
        assert g.element(i) == x


@pytest.mark.parametrize("factors", GROUPS)
def test_tables_match_coordinate_arithmetic(factors):
    g = as_group(factors)
    elems = g.elements()
    for a, b in itertools.product(elems, repeat=2):
        assert elems[g.mul_table[g.index(a), g.index(b)]] == oracles.add(a, b, factors)
    for a in elems:
        assert elems[g.inv_table[g.index(a)]] == oracles.neg(a, factors)
    for k, x in itertools.product(elems, repeat=2):
        assert abs(g.char_table[g.index(k), g.index(x)] - oracles.char(k, x, factors)) < 1e-12


@pytest.mark.parametrize("factors", GROUPS)
def test_character_orthogonality(factors):
    C = as_group(factors).char_table
    assert np.abs(C.conj() @ C.T - len(C) * np.eye(len(C))).max() < 1e-12
    assert len(as_group(factors).characters()) == as_group(factors).order


@given(
    st.sampled_from(GROUPS).flatmap(
        lambda f: st.tuples(st.just(f), *[st.tuples(*[st.integers(0, n - 1) for n in f]) for _ in range(3)])
    )
)
def test_homomorphism_and_axioms(data):
    factors, k, a, b = data
    g = as_group(factors)
    assert abs(g.char_value(k, g.mul(a, b)) - g.char_value(k, a) * g.char_value(k, b)) < 1e-12
    assert g.mul(a, b) == g.mul(b, a)
    assert g.mul(a, g.inv(a)) == g.identity
    assert g.mul(g.mul(a, b), k) == g.mul(a, g.mul(b, k))


def test_errors():
    with pytest.raises(GroupMismatchError):
        as_group([2, 3]).mul((1,), (1, 1))
    with pytest.raises(GroupMismatchError):
        as_group(4).coerce(4)
    with pytest.raises(GroupMismatchError):
        as_group([2, 2]).index(1)
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1,))
    with pytest.raises(ValueError):
        FiniteAbelianGroup(())
    assert as_group(4).wrap(-1) == (3,)
