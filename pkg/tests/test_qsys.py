import itertools

import numpy as np
import pytest
from conftest import random_density
from hypothesis import given, settings
from hypothesis import strategies as st

from multient.errors import CapacityError, ValidationError
from multient.gridcount import Graph, path_graph
from multient.linalg import trace_norm
from multient.qsys import (
    Bipartition,
    DensityMatrix,
    SystemLayout,
    basis_state,
    bell_pair,
    bipartitions,
    cluster_state,
    dephase_site,
    grid_pair_state,
    maximally_mixed,
    partial_trace,
    partial_transpose,
    permute_sites,
    phase_cat,
    product_state,
    regroup,
    transpose_sites,
    w_reduced,
    w_reduced_compact,
    w_state,
    werner,
)

PSI_PLUS = np.array([0, 1, 1, 0]) / np.sqrt(2)


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def test_layout_and_state_validation():
    with pytest.raises(ValidationError):
        SystemLayout((2, 1))
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(4), SystemLayout((2, 2)))
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.5, -0.5]), SystemLayout((2,)))
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(3) / 3, SystemLayout((2, 2)))


def test_bipartition_validation():
    with pytest.raises(ValidationError):
        Bipartition(frozenset(), frozenset({0}))
    with pytest.raises(ValidationError):
        Bipartition(frozenset({0}), frozenset({0, 1}))
    with pytest.raises(ValidationError):
        Bipartition.split([0], 3).check(SystemLayout((2, 2)))
    assert len(bipartitions(4)) == 7


def test_partial_trace_product(rng):
    a = random_density((2,), rng)
    b = random_density((3,), rng)
    both = product_state(a, b)
    assert np.allclose(partial_trace(both, [0]).matrix, a.matrix)
    assert np.allclose(partial_trace(both, [1]).matrix, b.matrix)
    with pytest.raises(ValidationError):
        partial_trace(both, [])


def test_partial_trace_w3():
    got = partial_trace(w_state(3), [1, 2]).matrix
    expected = proj([1, 0, 0, 0]) / 3 + 2 / 3 * proj(PSI_PLUS)
    assert np.allclose(got, expected, atol=1e-14)


def test_partial_trace_bell():
    assert np.allclose(partial_trace(bell_pair(), [1]).matrix, np.eye(2) / 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 3), min_size=2, max_size=4), st.integers(0, 2**32 - 1), st.data())
def test_partial_trace_preserves_trace_and_psd(dims, seed, data):
    rho = random_density(dims, np.random.default_rng(seed))
    keep = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1))
    red = partial_trace(rho, keep)
    assert red.dims == tuple(dims[k] for k in sorted(keep))
    assert np.trace(red.matrix).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(red.matrix)[0] >= -1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.data())
def test_contractivity_of_partial_trace(n, seed, data):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density((2,) * n, rng), random_density((2,) * n, rng)
    keep = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    small = trace_norm(partial_trace(rho, keep).matrix - partial_trace(sigma, keep).matrix)
    assert small <= trace_norm(rho.matrix - sigma.matrix) + 1e-10


def test_partial_transpose_examples(rng):
    a, b = random_density((2,), rng), random_density((3,), rng)
    pt = partial_transpose(product_state(a, b), Bipartition.split([0], 2))
    assert np.allclose(pt, np.kron(a.matrix, b.matrix.T))
    assert np.linalg.eigvalsh(pt)[0] >= -1e-12
    lam = np.sort(np.linalg.eigvalsh(partial_transpose(bell_pair(), Bipartition.split([0], 2))))
    assert np.allclose(lam, [-0.5, 0.5, 0.5, 0.5])
    lam = np.linalg.eigvalsh(partial_transpose(w_reduced(3, 2), Bipartition.split([0], 2)))
    assert lam[0] == pytest.approx((1 - np.sqrt(5)) / 6, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 3), min_size=2, max_size=3), st.integers(0, 2**32 - 1), st.data())
def test_partial_transpose_properties(dims, seed, data):
    rho = random_density(dims, np.random.default_rng(seed))
    a = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1, max_size=len(dims) - 1))
    cut = Bipartition.split(a, len(dims))
    pt = partial_transpose(rho, cut)
    assert np.allclose(pt, pt.conj().T)
    assert np.trace(pt).real == pytest.approx(1.0)
    # involution: transposing the same factor again recovers rho
    assert np.allclose(transpose_sites(pt, rho.dims, cut.b_sites), rho.matrix)
    lam = np.linalg.eigvalsh(pt)
    npt = lam[0] < -1e-10
    assert (np.sum(np.abs(lam)) > 1 + 1e-10) == npt or abs(lam[0]) < 1e-9


def test_dephase_site():
    diag = DensityMatrix(np.diag([0.1, 0.2, 0.3, 0.4]), SystemLayout((2, 2)))
    assert np.allclose(dephase_site(diag, 0).matrix, diag.matrix)
    deph = dephase_site(bell_pair(), 0).matrix
    assert np.allclose(deph, (proj([1, 0, 0, 0]) + proj([0, 0, 0, 1])) / 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_dephase_idempotent(seed, site):
    rho = random_density((2, 3, 2), np.random.default_rng(seed))
    once = dephase_site(rho, site)
    assert np.allclose(dephase_site(once, site).matrix, once.matrix)
    assert np.trace(once.matrix).real == pytest.approx(1.0)


def test_regroup_bookkeeping(rng):
    rho = random_density((2, 2, 2, 2), rng)
    merged = regroup(rho, [[0, 1], [2, 3]])
    assert merged.dims == (4, 4)
    assert np.allclose(merged.matrix, rho.matrix)
    with pytest.raises(ValidationError):
        regroup(rho, [[0, 1], [1, 2, 3]])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)))
def test_partial_trace_commutes_with_regroup(seed, perm):
    rho = random_density((2, 2, 2, 2), np.random.default_rng(seed), rank=3)
    groups = [list(perm[:2]), list(perm[2:])]
    merged = regroup(rho, groups)
    after = partial_trace(merged, [0]).matrix
    # partial_trace keeps ascending site order; reorder to the group's order
    order = [sorted(groups[0]).index(s) for s in groups[0]]
    before = permute_sites(partial_trace(rho, groups[0]), order).matrix
    assert np.allclose(after, before, atol=1e-13)


def test_grid_pair_state_layouts():
    one = grid_pair_state(1, 2, 0.7)
    assert one.dims == (2, 2)
    assert np.allclose(one.matrix, werner(0.7).matrix)
    grid = grid_pair_state(2, 2, 1.0)
    assert grid.dims == (4, 4, 4, 4)
    for v in range(4):
        assert np.allclose(partial_trace(grid, [v]).matrix, np.eye(4) / 4)
    with pytest.raises(CapacityError, match="limited to 8"):
        grid_pair_state(2, 3, 1.0)


def test_werner_family():
    assert np.allclose(werner(0).matrix, np.eye(4) / 4)
    assert np.allclose(bell_pair().matrix, werner(1).matrix)
    with pytest.raises(ValidationError):
        werner(1.2)
    for p in np.linspace(0, 1, 21):
        lam = np.linalg.eigvalsh(partial_transpose(werner(p), Bipartition.split([0], 2)))
        assert np.allclose(np.sort(lam), np.sort([(1 + p) / 4] * 3 + [(1 - 3 * p) / 4]))


def test_w_state_basics():
    assert np.allclose(w_state(1).matrix, proj([0, 1]))
    assert np.allclose(w_state(2).matrix, proj(PSI_PLUS))
    with pytest.raises(ValidationError):
        w_state(0)


@pytest.mark.parametrize("n", range(2, 7))
def test_w_state_permutation_symmetric(n):
    rho = w_state(n)
    for i, j in itertools.combinations(range(n), 2):
        order = list(range(n))
        order[i], order[j] = order[j], order[i]
        assert np.allclose(permute_sites(rho, order).matrix, rho.matrix)


@pytest.mark.parametrize("n", range(2, 8))
def test_w_reduced_matches_brute_force(n):
    full = w_state(n)
    assert np.allclose(w_reduced(n, n).matrix, full.matrix)
    for k in range(2, n + 1):
        closed = w_reduced(n, k).matrix
        for keep in itertools.islice(itertools.combinations(range(n), k), 6):
            assert np.max(np.abs(partial_trace(full, keep).matrix - closed)) <= 1e-12
    with pytest.raises(ValidationError):
        w_reduced(n, n + 1)


def test_w_reduced_three_two():
    expected = proj([1, 0, 0, 0]) / 3 + 2 / 3 * proj(PSI_PLUS)
    assert np.allclose(w_reduced(3, 2).matrix, expected)


def test_w_reduced_compact():
    m = w_reduced_compact(2, 2, 1).matrix
    assert np.allclose(m, [[0, 0, 0, 0], [0, 0.5, 0.5, 0], [0, 0.5, 0.5, 0], [0, 0, 0, 0]])
    for n in range(2, 13):
        for k in range(2, n + 1):
            for j in range(1, k):
                assert np.trace(w_reduced_compact(n, k, j).matrix).real == pytest.approx(1.0)
    cut = Bipartition.split([0], 2)
    compact = np.linalg.eigvalsh(partial_transpose(w_reduced_compact(3, 2, 1), cut))[0]
    full = np.linalg.eigvalsh(partial_transpose(partial_trace(w_state(3), [0, 1]), cut))[0]
    assert compact == pytest.approx(full, abs=1e-12)


def test_cluster_states():
    assert np.allclose(cluster_state(Graph(1, ())).matrix, np.full((2, 2), 0.5))
    pair = cluster_state(path_graph(2))
    lam = np.linalg.eigvalsh(partial_transpose(pair, Bipartition.split([0], 2)))
    assert -lam[lam < 0].sum() == pytest.approx(0.5)
    three = cluster_state(path_graph(3))
    traced = partial_trace(cluster_state(path_graph(4)), [0, 1, 2])
    assert np.allclose(dephase_site(traced, 2).matrix, traced.matrix)
    assert not np.allclose(dephase_site(three, 1).matrix, three.matrix)


def test_phase_cat():
    assert np.allclose(phase_cat(1, 0).matrix, np.full((2, 2), 0.5))
    ref = phase_cat(5, 0.0)
    for phi in (0.3, np.pi / 2, np.pi):
        rho = phase_cat(5, phi)
        for keep in itertools.combinations(range(5), 4):
            d = trace_norm(partial_trace(rho, keep).matrix - partial_trace(ref, keep).matrix)
            assert d <= 1e-12
    assert trace_norm(phase_cat(5, np.pi).matrix - ref.matrix) > 0.4


def test_helpers():
    assert np.allclose(maximally_mixed((2, 3)).matrix, np.eye(6) / 6)
    assert basis_state("01").matrix[1, 1] == 1
