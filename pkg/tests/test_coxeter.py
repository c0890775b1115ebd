import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymhecke.coxeter import (BUILTIN_NAMES, CoxeterDescriptor, CoxeterError, CoxeterGroup,
                               WordError, builtin_descriptor)

ORDERS = {"A1": 2, "A2": 6, "A3": 24, "A4": 120, "B3": 48, "H3": 120,
          "I2_3": 6, "I2_4": 8, "I2_5": 10, "I2_6": 12, "I2_7": 14, "I2_8": 16}
LONGEST = {"A3": 6, "A4": 10, "B3": 9, "H3": 15, "I2_5": 5, "I2_7": 7}


@pytest.fixture(scope="module")
def groups():
    return {name: CoxeterGroup.builtin(name) for name in ORDERS}


@pytest.mark.parametrize("name", sorted(ORDERS))
def test_orders(groups, name):
    assert groups[name].order == ORDERS[name]


@pytest.mark.parametrize("name", sorted(LONGEST))
def test_longest_length_equals_reflection_count(groups, name):
    g = groups[name]
    assert g.longest_length == LONGEST[name] == g.n_pos_roots


def test_h4_order_and_longest_length():
    g = CoxeterGroup.builtin("H4")
    assert g.order == 14400
    assert g.longest_length == 60 == g.n_pos_roots
    dist = g.length_distribution()
    assert dist == dist[::-1] and sum(dist) == 14400


@pytest.mark.parametrize("name", sorted(ORDERS))
def test_length_distribution_is_symmetric(groups, name):
    dist = groups[name].length_distribution()
    assert dist == dist[::-1]


@pytest.mark.parametrize("name", ["A3", "B3", "H3", "I2_5"])
def test_words_are_reduced_shortlex_and_consistent(groups, name):
    g = groups[name]
    for w in range(g.order):
        word = g.word(w)
        assert len(word) == g.length(w)
        assert g.parse_word(word) == w
    keys = [(len(g.word(w)), [g.names.index(c) for c in g.word(w)]) for w in range(g.order)]
    assert keys == sorted(keys)


@pytest.mark.parametrize("name", ["A3", "B3", "H3"])
def test_group_axioms(groups, name, rng):
    g = groups[name]
    for _ in range(200):
        x, y, z = (rng.randrange(g.order) for _ in range(3))
        assert g.multiply(g.multiply(x, y), z) == g.multiply(x, g.multiply(y, z))
        assert g.multiply(x, int(g.inverse[x])) == 0
        assert g.length(x) == g.length(int(g.inverse[x]))
        assert g.multiply(g.w0, x) == int(g.w0_times[x])
        assert g.length(int(g.w0_times[x])) == g.longest_length - g.length(x)


@pytest.mark.parametrize("name", ["I2_5", "A3", "B3", "H3"])
def test_descents_match_lengths(groups, name):
    g = groups[name]
    for w in range(g.order):
        for i, s in enumerate(g.names):
            assert (s in g.descents_left(w)) == (g.length(int(g.lmul[i, w])) < g.length(w))
            assert (s in g.descents_right(w)) == (g.length(int(g.rmul[i, w])) < g.length(w))


def _subword_lower_set(g, w):
    word = g.word(w)
    out = set()
    for mask in itertools.product([0, 1], repeat=len(word)):
        out.add(g.parse_word("".join(c for c, keep in zip(word, mask) if keep)))
    return out


@pytest.mark.parametrize("name", ["I2_5", "A3", "B3"])
def test_bruhat_matches_subword_property(groups, name):
    g = groups[name]
    B = g.bruhat_matrix
    for w in range(g.order):
        below = set(np.flatnonzero(B[w]).tolist())
        assert below == _subword_lower_set(g, w)


def test_bruhat_matrix_agrees_with_recursive_test(groups, rng):
    g = groups["H3"]
    for _ in range(500):
        x, w = rng.randrange(g.order), rng.randrange(g.order)
        assert g.bruhat_leq(x, w) == g.bruhat_leq_recursive(x, w)


def test_bruhat_is_a_partial_order(groups):
    g = groups["A3"]
    B = g.bruhat_matrix.astype(int)
    assert (np.diag(B) == 1).all()
    assert not ((B & B.T) & ~np.eye(g.order, dtype=bool)).any()
    assert ((B @ B > 0) <= (B > 0)).all()


def test_parse_word_error_position(groups):
    g = groups["A3"]
    with pytest.raises(WordError) as exc:
        g.parse_word("abxc")
    assert exc.value.pos == 2


def test_descriptor_parse_and_digest():
    text = "rank 3\norder a b c\ncoxeter a b 3\ncoxeter b c 5\n"
    d = CoxeterDescriptor.parse(text)
    assert d == builtin_descriptor("H3")
    assert d.digest() == builtin_descriptor("H3").digest()
    assert CoxeterDescriptor.parse(d.canonical_text()) == d


@pytest.mark.parametrize("text,msg", [
    ("order a b\ncoxeter a b 1\n", ">= 2"),
    ("order a b\ncoxeter a z 3\n", "undeclared"),
    ("rank 3\norder a b\n", "does not match"),
    ("order a b\nbogus 1\n", "unknown keyword"),
    ("coxeter a b 3\n", "no 'order'"),
])
def test_descriptor_errors(text, msg):
    with pytest.raises(CoxeterError, match=msg):
        CoxeterDescriptor.parse(text)


def test_cyclic_graph_rejected():
    d = CoxeterDescriptor.from_bonds("abc", [("a", "b", 3), ("b", "c", 3), ("a", "c", 3)])
    with pytest.raises(CoxeterError):
        CoxeterGroup(d)


def test_infinite_or_oversized_group_rejected():
    d = CoxeterDescriptor.from_bonds("abc", [("a", "b", 3), ("b", "c", 6)])  # affine G2
    with pytest.raises(CoxeterError):
        CoxeterGroup(d, ceiling=5000)


def test_ceiling_enforced():
    with pytest.raises(CoxeterError):
        CoxeterGroup.builtin("H3", ceiling=100)


@given(st.integers(2, 12))
@settings(max_examples=11, deadline=None)
def test_dihedral_orders(m):
    g = CoxeterGroup.builtin(f"I2_{m}")
    assert g.order == 2 * m
    assert g.longest_length == m


def test_element_wrapper(groups):
    g = groups["A3"]
    x, y = g.element("ab"), g.element("ba")
    assert (x * y).word == g.word(g.parse_word("abba"))
    assert x.inverse() == y
    assert g.element("a") <= x
    assert x.length == 2 and x.sign == 1
    with pytest.raises(ValueError):
        x * groups["B3"].element("a")


def test_builtin_names_all_construct():
    for name in BUILTIN_NAMES:
        if name != "H4":
            assert CoxeterGroup.builtin(name).order > 0
