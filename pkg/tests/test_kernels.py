"""The compiled and pure-Python kernels must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bracketlab import kernels
from bracketlab._pykernels import bracket_tally as py_bracket, rr_completion_classes as py_rr
from bracketlab.generators import gen_double_elim, gen_round_robin, gen_single_elim
from bracketlab.precision import compile_bracket, _pack

needs_ext = pytest.mark.skipif("cython" not in kernels.backends(), reason="extension not built")


def _groups_for(n, cuts, rng):
    slots = list(rng.permutation(n))
    vals = list(rng.permutation(np.arange(1, n + 1)))
    edges = [0] + sorted(set(cuts)) + [n]
    return [(slots[a:b], sorted(vals[a:b])) for a, b in zip(edges, edges[1:]) if b > a]


@needs_ext
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), cuts=st.lists(st.integers(1, 7), max_size=3),
       which=st.sampled_from(["se", "de"]))
def test_bracket_backends_agree(seed, cuts, which):
    c = kernels.backends()["cython"]
    g = gen_single_elim(3) if which == "se" else gen_double_elim(3)
    rng = np.random.default_rng(seed)
    groups = _groups_for(8, cuts or [4], rng)
    src, wp, lp = compile_bracket(g)
    k = len(g.placement_classes)
    packed = _pack(groups)
    assert np.array_equal(c.bracket_tally(8, src, wp, lp, k, *packed), py_bracket(8, src, wp, lp, k, *packed))


@needs_ext
def test_rr_tally_backends_agree():
    c, p = kernels.backends()["cython"], kernels.backends()["python"]
    s = gen_round_robin(6)
    pairs = np.array(s.pairs(), dtype=np.int32)
    packed = _pack([(list(range(6)), list(range(1, 7)))])
    assert np.array_equal(c.rr_tally(6, pairs, *packed), p.rr_tally(6, pairs, *packed))


@needs_ext
@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.sampled_from([2, 4, 6, 8]), m=st.integers(0, 10))
def test_completion_backends_agree(seed, n, m):
    c = kernels.backends()["cython"]
    rng = np.random.default_rng(seed)
    rem = np.array([rng.choice(n, 2, replace=False) for _ in range(m)], dtype=np.int32).reshape(-1, 2)
    base = rng.integers(0, 5, n).astype(np.int32)
    assert np.array_equal(c.rr_completion_classes(n, base, rem), py_rr(n, base, rem))


def test_completion_codes_by_hand():
    # two players level on 1 win, one match left between them
    codes = py_rr(2, np.array([1, 1], dtype=np.int32), np.array([[0, 1]], dtype=np.int32))
    # bit 0 clear: player 1 wins -> player 1 alone first (lo=hi=0), player 0 second (lo=hi=1)
    assert codes.tolist() == [[1 * 2 + 1, 0], [0, 1 * 2 + 1]]


def test_lexicographic_single_group():
    # python fallback walks permutations in lexicographic order; the tally is order-free
    g = gen_single_elim(2)
    src, wp, lp = compile_bracket(g)
    packed = _pack([([0, 1, 2, 3], [1, 2, 3, 4])])
    t = py_bracket(4, src, wp, lp, 3, *packed)
    assert t.sum() == 24 * 4
