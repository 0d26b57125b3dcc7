import pytest

from bipers.bigraded import INF, Hook, Presentation, classification_box, hilbert_function, stable_grid, to_grid
from bipers.classify import verify_certificate
from bipers.decomposition import (
    GridMorphism,
    decompose_oracle,
    grid_direct_sum,
    hom_basis,
    hook_decompose,
    hook_grid,
    hook_profile,
)
from bipers.errors import ThresholdExceeded
from bipers.generators import (
    RandomSpec,
    free_module,
    gallery,
    hook_module,
    random_hook_summands,
    random_module,
)
from bipers.linalg import Matrix


def hooks_as_pairs(hooks):
    return sorted((h.p, h.q) for h in hooks)


# ---------------------------------------------------------------- hom spaces


def test_endomorphisms_of_free_point_are_scalars():
    g = to_grid(free_module([(0, 0)]), (2, 2))
    basis = hom_basis(g, g)
    assert len(basis) == 1
    assert basis[0].is_natural()


def test_no_map_from_hook_to_free():
    # Any map must kill the generator: its image would die at (1,1), but
    # multiplication is injective on the free target.
    hgrid = to_grid(hook_module(Hook((0, 0), (1, 1))), (2, 2))
    fgrid = to_grid(free_module([(0, 0)]), (2, 2))
    assert hom_basis(hgrid, fgrid) == []


def test_remark2_has_endomorphisms():
    g, _ = stable_grid(gallery("pd1-not-hook"))
    basis = hom_basis(g, g)
    assert len(basis) >= 1
    for t in basis:
        assert t.is_natural()


def test_identity_morphism_is_natural_iso():
    g, _ = stable_grid(gallery("remark2-hilbert-twin"))
    ident = GridMorphism.identity(g)
    assert ident.is_natural() and ident.is_isomorphism()


# -------------------------------------------------------------- hook profile


def test_profile_of_hook_grid():
    grid = to_grid(hook_module(Hook((1, 0), (2, 2))), (3, 3))
    assert hook_profile(grid) == Hook((1, 0), (2, 2))


def test_profile_of_free_hook_grid():
    grid = to_grid(hook_module(Hook((2, 1), (INF, INF))), (4, 4))
    assert hook_profile(grid) == Hook((2, 1), (INF, INF))


def test_profile_rejects_staircase_support():
    grid, _ = stable_grid(gallery("pd1-not-hook"))
    assert hook_profile(grid) is None


def test_profile_rejects_dimension_two():
    grid, _ = stable_grid(free_module([(0, 0), (0, 0)]))
    assert hook_profile(grid) is None


def test_profile_rejects_zero_module():
    grid, _ = stable_grid(Presentation(2, [], []))
    assert hook_profile(grid) is None


# ----------------------------------------------------------- hook decompose


def test_remark1_module_decomposes():
    cert = hook_decompose(gallery("hook-not-free"))
    assert cert is not None
    assert hooks_as_pairs(cert.hooks) == [((0, 0), (1, 1))]
    assert verify_certificate(gallery("hook-not-free"), cert)


def test_remark2_module_does_not_decompose():
    assert hook_decompose(gallery("pd1-not-hook")) is None
    assert hook_decompose(gallery("pd1-not-hook-f3")) is None


def test_free_module_decomposes_into_free_hooks():
    cert = hook_decompose(free_module([(0, 0), (2, 3)]))
    assert cert is not None
    assert hooks_as_pairs(cert.hooks) == [((0, 0), (INF, INF)), ((2, 3), (INF, INF))]


def test_zero_module_decomposes_as_empty_sum():
    cert = hook_decompose(Presentation(2, [], []))
    assert cert is not None and cert.hooks == ()


def test_koszul_point_does_not_decompose():
    assert hook_decompose(gallery("koszul-point")) is None


def test_hilbert_twin_regression():
    # Same Hilbert function on the box as pd1-not-hook, but this one is a
    # genuine hook sum; the retraction test is what separates the two.
    twin = gallery("remark2-hilbert-twin")
    other = gallery("pd1-not-hook")
    box = classification_box(other)
    for a in range(box[0] + 1):
        for b in range(box[1] + 1):
            assert hilbert_function(twin, (a, b)) == hilbert_function(other, (a, b))
    cert = hook_decompose(twin)
    assert cert is not None
    assert hooks_as_pairs(cert.hooks) == [((0, 1), (1, 1)), ((1, 0), (INF, INF))]
    assert hook_decompose(other) is None


@pytest.mark.parametrize("seed", range(20))
def test_scramble_recovery_round_trip(seed):
    spec = RandomSpec("hook_sum_scrambled", max_hooks=4, max_degree=6, seed=700 + seed)
    constructed = random_hook_summands(spec)
    pres = random_module(spec)
    cert = hook_decompose(pres)
    assert cert is not None
    assert hooks_as_pairs(cert.hooks) == hooks_as_pairs(constructed)
    assert verify_certificate(pres, cert)


def test_explicit_scrambled_pair_of_hooks():
    from bipers.bigraded import direct_sum

    pres = direct_sum(hook_module(Hook((0, 0), (2, 1))), hook_module(Hook((1, 1), (3, 3))))
    # Degree-legal change of basis by hand: add gen0 into gen1, mix columns.
    c = pres.coeffs.a.copy()
    c[0] = (c[0] + c[1]) % 2  # p0 <= p1: row op adding gen1 row into gen0 row
    scrambled = Presentation(2, pres.gens, pres.rels, Matrix(2, c))
    cert = hook_decompose(scrambled)
    assert cert is not None
    assert hooks_as_pairs(cert.hooks) == [((0, 0), (2, 1)), ((1, 1), (3, 3))]


@pytest.mark.parametrize("seed", range(20))
def test_certificate_hilbert_conservation(seed):
    spec = RandomSpec("hook_sum_scrambled", max_hooks=4, max_degree=5, seed=800 + seed)
    pres = random_module(spec)
    cert = hook_decompose(pres)
    assert cert is not None
    box = classification_box(pres)
    for a in range(box[0] + 1):
        for b in range(box[1] + 1):
            total = sum(1 for h in cert.hooks if h.supports((a, b)))
            assert total == hilbert_function(pres, (a, b))


# ------------------------------------------------------------------- oracle


def test_oracle_on_single_hook():
    grid, _ = stable_grid(hook_module(Hook((0, 0), (2, 2))))
    summands = decompose_oracle(grid)
    assert len(summands) == 1


def test_oracle_splits_two_hooks():
    from bipers.bigraded import direct_sum

    pres = direct_sum(hook_module(Hook((0, 0), (2, 1))), hook_module(Hook((1, 1), (3, 3))))
    grid, _ = stable_grid(pres)
    summands = decompose_oracle(grid)
    assert len(summands) == 2
    got = sorted((hook_profile(s).p, hook_profile(s).q) for s in summands)
    assert got == [((0, 0), (2, 1)), ((1, 1), (3, 3))]


def test_oracle_remark2_indecomposable():
    grid, _ = stable_grid(gallery("pd1-not-hook"))
    assert len(decompose_oracle(grid)) == 1


def test_oracle_threshold():
    grid, _ = stable_grid(free_module([(0, 0)] * 5))
    with pytest.raises(ThresholdExceeded):
        decompose_oracle(grid, threshold=3)


@pytest.mark.parametrize("seed", range(15))
def test_oracle_agrees_with_hook_decompose(seed):
    spec = RandomSpec("arbitrary", max_gens=3, max_rels=3, max_degree=3, seed=900 + seed)
    pres = random_module(spec)
    grid, _ = stable_grid(pres)
    try:
        summands = decompose_oracle(grid)
    except ThresholdExceeded:
        pytest.skip("endomorphism algebra above oracle threshold")
    profiles = [hook_profile(s) for s in summands]
    cert = hook_decompose(pres)
    assert (cert is not None) == all(pr is not None for pr in profiles)
    if cert is not None:
        assert hooks_as_pairs(cert.hooks) == sorted((pr.p, pr.q) for pr in profiles)


def test_oracle_summands_preserve_total_dimension():
    spec = RandomSpec("hook_sum_scrambled", max_hooks=3, max_degree=4, seed=42)
    pres = random_module(spec)
    grid, _ = stable_grid(pres)
    summands = decompose_oracle(grid)
    total = sum(s.dims for s in summands)
    assert (total == grid.dims).all()


# -------------------------------------------------------------- direct sums


def test_grid_direct_sum_dims_and_commutativity():
    box = (3, 3)
    g1 = hook_grid(Hook((0, 0), (1, 2)), 2, box)
    g2 = hook_grid(Hook((1, 1), (INF, INF)), 2, box)
    s = grid_direct_sum([g1, g2], 2, box)
    assert (s.dims == g1.dims + g2.dims).all()
    s._check()  # shape and commutativity pass
