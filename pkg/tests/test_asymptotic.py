import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymhecke.asymptotic import (GammaFormatError, GammaTensor, TensorInvariantError, check_tensor,
                                  cyclic_symmetry_failures, delta_and_mu, find_identity,
                                  format_gamma, inverse_pairing, left_mult_matrix, lhs_polynomial,
                                  read_gamma, small_cell_summary, tensor_from_matrices)
from asymhecke.cells import intersection_with_inverse
from asymhecke.exact import char_poly

SMALL = ["I2_3", "I2_4", "I2_5", "I2_6", "A3", "B3", "H3"]
A_VALUES = {
    "I2_3": {0, 1, 3}, "I2_4": {0, 1, 4}, "I2_5": {0, 1, 5}, "I2_6": {0, 1, 6},
    "A3": {0, 1, 2, 3, 6}, "B3": {0, 1, 2, 3, 4, 9}, "H3": {0, 1, 2, 3, 5, 6, 15},
}


def a_of_elements(p):
    """a-value of every element, read from the cell rings."""
    out = [None] * p.group.order
    for ring in p.rings:
        for x in ring.cell:
            out[x] = ring.a_value
    return out


@pytest.mark.parametrize("name", SMALL)
def test_a_values(pipeline, name):
    p = pipeline(name)
    assert {r.a_value for r in p.rings} == A_VALUES[name]
    a = a_of_elements(p)
    assert a[0] == 0
    assert a[p.group.w0] == p.group.longest_length


@pytest.mark.parametrize("name", SMALL)
def test_a_constant_on_two_sided_cells(pipeline, name):
    p = pipeline(name)
    a = a_of_elements(p)
    for block in p.twosided.blocks:
        assert len({a[x] for x in block}) == 1


@pytest.mark.parametrize("name", SMALL)
def test_distinguished_involutions(pipeline, name):
    p = pipeline(name)
    g, kl = p.group, p.kl
    seen = set()
    for ring in p.rings:
        d = ring.distinguished
        assert int(g.inverse[d]) == d
        assert g.length(d) - 2 * (len(kl.P(0, d)) - 1) == ring.a_value
        assert len(find_identity(ring.tensor.G)) == 1
        seen.add(d)
    assert len(seen) == len(p.left)


@pytest.mark.parametrize("name", SMALL)
def test_tensor_invariants_and_symmetries(pipeline, name):
    p = pipeline(name)
    g = p.group
    for ring in p.rings:
        t = ring.tensor
        assert check_tensor(t) == []
        assert cyclic_symmetry_failures(t) == 0
        pos = {x: i for i, x in enumerate(ring.basis)}
        inv = [pos[int(g.inverse[x])] for x in ring.basis]
        assert inverse_pairing(t) == inv
        G = t.G
        for i in range(t.n):
            for j in range(t.n):
                for k in range(t.n):
                    assert G[i, j, k] == G[inv[j], inv[i], inv[k]]


@pytest.mark.parametrize("name", SMALL)
def test_a_value_recomputed_from_degrees(pipeline, name):
    p = pipeline(name)
    g = p.group
    for ring in p.rings:
        best = max(d - (g.length(x) + g.length(y) - g.length(z)) for (x, y, z), d in ring.degrees.items())
        assert best == ring.a_value
        _, mu, _ = delta_and_mu(g, p.kl, ring.basis)
        assert mu == ring.a_value


def test_small_cell_laws(pipeline):
    middle = {m: [r for r in pipeline(f"I2_{m}").rings if r.a_value == 1] for m in (4, 5)}
    assert {small_cell_summary(r) for r in middle[4]} == {"Z t_e + Z t_s, t_s^2 = t_e"}
    assert {small_cell_summary(r) for r in middle[5]} == {"Z t_e + Z t_s, t_s^2 = t_e + t_s"}
    for r in pipeline("H3").rings:
        if r.a_value == 0:
            assert small_cell_summary(r) == "Z t_e, t_e^2 = t_e"


@pytest.mark.parametrize("name", ["I2_5", "A3", "B3", "H3"])
def test_leading_coefficients_for_arbitrary_targets(pipeline, name, rng):
    """Degree bound ``a(z)`` and leading coefficient for ``x, y`` in a cell ring and any ``z``."""
    p = pipeline(name)
    g, kl = p.group, p.kl
    a = a_of_elements(p)
    for _ in range(60):
        ring = rng.choice(p.rings)
        x, y = rng.choice(ring.basis), rng.choice(ring.basis)
        z = rng.randrange(g.order)
        L = lhs_polynomial(g, kl, x, y, z)
        shift = g.length(x) + g.length(y) - g.length(z)
        assert L.degree() - shift <= a[z]
        expected = 0
        if z in ring.basis:
            pos = {w: i for i, w in enumerate(ring.basis)}
            expected = int(ring.tensor.G[pos[x], pos[y], pos[z]])
        assert L.coeff(a[z] + shift) == expected


def test_gamma_file_roundtrip_and_determinism(pipeline, tmp_path):
    for ring in pipeline("H3").rings:
        text = format_gamma(ring.tensor)
        back = read_gamma(text, is_text=True)
        assert back == ring.tensor
        assert back.a_value == ring.a_value
        assert back.words == ring.tensor.words
        assert format_gamma(back) == text
    ring = pipeline("B3").rings[1]
    lines = format_gamma(ring.tensor).splitlines()
    entries = [tuple(map(int, ln.split()[1:4])) for ln in lines if ln.startswith("g ")]
    assert entries == sorted(entries)


@pytest.mark.parametrize("text,msg", [
    ("n 2\n", "header"),
    ("gamma v1\n", "'n'"),
    ("gamma v1\nn 1\ng 1 1 2 1\n", "out of range"),
    ("gamma v1\nn 1\nfoo 1\n", "unknown keyword"),
    ("gamma v1\nn x\n", "malformed"),
    ("gamma v1\nn 2\nwords a\n", "wrong length"),
])
def test_gamma_format_errors(text, msg):
    with pytest.raises(GammaFormatError, match=msg):
        read_gamma(text, is_text=True)


def _fib():
    G = np.zeros((2, 2, 2), dtype=np.int64)
    G[0, 0, 0] = G[0, 1, 1] = G[1, 0, 1] = 1
    G[1, 1, 0] = G[1, 1, 1] = 1
    return GammaTensor(G, 0)


def test_check_tensor_detects_failures():
    t = _fib()
    assert check_tensor(t) == []
    bad = GammaTensor(_small_fixture().G.copy(), 0)
    bad.G[1, 1, 2] += 1
    problems = check_tensor(bad, raise_on_failure=False)
    assert any("associativity" in p for p in problems)
    with pytest.raises(TensorInvariantError):
        check_tensor(bad)
    neg = GammaTensor(t.G.copy(), 0)
    neg.G[1, 1, 1] = -1
    assert any("negative" in p for p in check_tensor(neg, raise_on_failure=False))
    noid = GammaTensor(np.ones((2, 2, 2), dtype=np.int64))
    assert any("identity" in p for p in check_tensor(noid, raise_on_failure=False))


@given(st.permutations(range(6)))
@settings(max_examples=30, deadline=None)
def test_relabel_preserves_invariants(perm):
    t = _small_fixture()
    p = list(perm) + list(range(6, t.n))
    r = t.relabel(p)
    assert check_tensor(r) == []
    assert r.relabel(np.argsort(p)) == t
    for j in range(t.n):
        assert char_poly(left_mult_matrix(t, j)) == char_poly(left_mult_matrix(r, p[j]))


_CACHE = {}


def _small_fixture():
    if "A1" not in _CACHE:
        from asymhecke.fixtures import fixture_tensor, load_fixture
        _CACHE["A1"] = fixture_tensor(load_fixture("A1"))
    return _CACHE["A1"]


def test_tensor_from_matrices_layout():
    t = _fib()
    mats = [left_mult_matrix(t, j) for j in range(2)]
    assert tensor_from_matrices(mats, 0) == t
    # transpose of M_j acts as left multiplication by t_j
    for j in range(2):
        for y in range(2):
            e = np.eye(2, dtype=np.int64)[y]
            assert (np.array(mats[j]).T @ e == t.product(np.eye(2, dtype=np.int64)[j], e)).all()


def test_product_and_summaries():
    t = _fib()
    assert small_cell_summary(t) == "Z t_e + Z t_s, t_s^2 = t_e + t_s"
    assert list(t.product([0, 1], [0, 1])) == [1, 1]
    with pytest.raises(ValueError):
        small_cell_summary(_small_fixture())


def test_basis_order_is_length_then_shortlex(pipeline):
    p = pipeline("H3")
    g = p.group
    for ring in p.rings:
        assert ring.basis == intersection_with_inverse(g, ring.cell)
        keys = [(g.length(x), g.word(x)) for x in ring.basis]
        assert keys == sorted(keys, key=lambda k: (k[0], [g.names.index(c) for c in k[1]]))
