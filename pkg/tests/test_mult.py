import numpy as np
import pytest

from thetamu import (
    IllConditioned,
    NotInSpan,
    ThetaBasis,
    ThetaTilde,
    Verdict,
    diagram_check,
    expand_in_basis,
    gamma_blocks,
    monotonicity_check,
    mu_matrix,
    numerical_rank,
    phi_map_coords,
    projective_residual,
    random_period_matrix,
    sample_points,
    section_weights,
    spanning_check,
    surjectivity_verdict,
    validate_polarized,
    wirtinger_matrix,
    zero_point,
)


@pytest.fixture(scope="module")
def elliptic_d3():
    return validate_polarized(random_period_matrix(1, 101), (3,), simple_asserted=True)


@pytest.fixture(scope="module")
def principal_g1():
    return validate_polarized(random_period_matrix(1, 106), (1,), simple_asserted=True)


@pytest.fixture(scope="module")
def principal_g2():
    return validate_polarized(random_period_matrix(2, 109), (1, 1), simple_asserted=True)


def test_sample_points_deterministic(elliptic_d3):
    s1 = sample_points(elliptic_d3, 12, 5)
    s2 = sample_points(elliptic_d3, 12, 5)
    assert np.array_equal(s1.z, s2.z)
    assert not np.array_equal(s1.z, sample_points(elliptic_d3, 12, 6).z)


def test_expand_recovers_basis_vectors(elliptic_d3):
    basis = ThetaBasis(elliptic_d3, 2)
    samples = sample_points(elliptic_d3, 2 * basis.dim, 3)
    unit = expand_in_basis(
        elliptic_d3, 2, lambda zs: basis.eval_matrix(zs)[4], samples, basis=basis
    )
    expected = np.zeros(basis.dim)
    expected[4] = 1.0
    assert np.allclose(unit.coefficients, expected, atol=1e-10)
    assert unit.residual < 1e-10
    pair = expand_in_basis(
        elliptic_d3,
        2,
        lambda zs: basis.eval_matrix(zs)[0] + basis.eval_matrix(zs)[1],
        samples,
        basis=basis,
    )
    expected = np.zeros(basis.dim)
    expected[:2] = 1.0
    assert np.allclose(pair.coefficients, expected, atol=1e-10)


def test_expand_theta_tilde_is_all_ones(principal_g1):
    n = 3
    tilde = ThetaTilde(principal_g1, n)
    samples = sample_points(principal_g1, 2 * principal_g1.h0(n) + 2, 4)
    result = expand_in_basis(principal_g1, n, lambda zs: tilde.eval_many(zs), samples)
    assert np.allclose(result.coefficients, 1.0, atol=1e-10)


def test_expand_rejects_undersampling(elliptic_d3):
    samples = sample_points(elliptic_d3, 3, 1)
    with pytest.raises(ValueError):
        expand_in_basis(elliptic_d3, 2, lambda zs: zs[:, 0], samples)


def test_expand_flags_out_of_span(elliptic_d3):
    basis = ThetaBasis(elliptic_d3, 2)
    samples = sample_points(elliptic_d3, 2 * basis.dim, 9)
    with pytest.raises(NotInSpan):
        expand_in_basis(
            elliptic_d3, 2, lambda zs: np.conj(basis.eval_matrix(zs)[0]), samples, basis=basis
        )


def test_expand_ill_conditioned_cap(elliptic_d3):
    basis = ThetaBasis(elliptic_d3, 2)
    samples = sample_points(elliptic_d3, 2 * basis.dim, 3)
    with pytest.raises(IllConditioned):
        expand_in_basis(
            elliptic_d3, 2, lambda zs: basis.eval_matrix(zs)[0], samples,
            basis=basis, cond_cap=1.0,
        )


def test_mu_matrix_shapes(elliptic_d3, principal_g2):
    mu = mu_matrix(elliptic_d3, 1, 11)
    assert mu.matrix.shape == (6, 9)
    assert mu.max_residual < 1e-10
    assert len(mu.col_pairs) == 9
    mu_p = mu_matrix(principal_g2, 1, 13)
    assert mu_p.matrix.shape == (4, 1)


def test_mu_matrix_surface_shape():
    pav = validate_polarized(random_period_matrix(2, 104), (3, 3), simple_asserted=True)
    mu = mu_matrix(pav, 1, 14)
    assert mu.matrix.shape == (36, 81)


def test_numerical_rank_basics():
    rank, s, clean = numerical_rank(np.eye(3))
    assert (rank, clean) == (3, True)
    rank, _, clean = numerical_rank(np.zeros((4, 2)))
    assert (rank, clean) == (0, True)
    rank, _, clean = numerical_rank(np.diag([1.0, 1e-15]))
    assert (rank, clean) == (1, True)
    # a singular value sitting right at the threshold is flagged
    _, _, clean = numerical_rank(np.diag([1.0, 1e-8]))
    assert not clean


def test_surjectivity_elliptic_d3(elliptic_d3):
    verdict = surjectivity_verdict(elliptic_d3, 1, 11)
    assert verdict.verdict is Verdict.SURJECTIVE
    assert verdict.rank == 6 == verdict.required_rank
    assert verdict.gap_ratio > 1e3


def test_surjectivity_dimensional_obstruction(principal_g2):
    verdict = surjectivity_verdict(principal_g2, 1, 13)
    assert verdict.verdict is Verdict.NOT_SURJECTIVE
    assert verdict.dimensional_shortcut
    # the numeric rank agrees with the obstruction: rank <= 1 < 4
    mu = mu_matrix(principal_g2, 1, 13)
    assert numerical_rank(mu.matrix).rank < principal_g2.h0(2)


def test_verdict_invariant_under_reseeding(elliptic_d3):
    v1 = surjectivity_verdict(elliptic_d3, 1, 11)
    v2 = surjectivity_verdict(elliptic_d3, 1, 977)
    assert v1.verdict is v2.verdict
    assert v1.rank == v2.rank


def test_gamma_blocks_principal_single_block(principal_g1):
    mu = mu_matrix(principal_g1, 2, 15)
    blocks = gamma_blocks(principal_g1, 2, 15, mu=mu)
    assert len(blocks.blocks) == 1
    assert np.allclose(blocks.blocks[0].matrix, mu.matrix)
    assert blocks.off_block_mass == 0.0


def test_gamma_blocks_elliptic_d3(elliptic_d3):
    blocks = gamma_blocks(elliptic_d3, 1, 11)
    assert len(blocks.blocks) == 3
    for block in blocks.blocks:
        assert block.matrix.shape == (2, 3)
    assert blocks.off_block_mass < 1e-12
    assert blocks.rank_sum == blocks.total_rank == 6


def test_gamma_blocks_rank_additivity_catalog():
    cases = [((3,), 1, 101), ((4,), 1, 102), ((1, 2), 1, 33), ((3, 3), 1, 104)]
    for divisors, n, seed in cases:
        g = len(divisors)
        pav = validate_polarized(random_period_matrix(g, seed), divisors, True)
        blocks = gamma_blocks(pav, n, seed)
        assert blocks.off_block_mass < 1e-8
        assert blocks.rank_sum == blocks.total_rank


def test_wirtinger_g1_n1_lemniscatic():
    pav = validate_polarized(np.array([[1j]]), (1,), simple_asserted=True)
    wirt = wirtinger_matrix(pav, 1, 21)
    assert wirt.full.shape == (2, 2)
    assert wirt.fit_residual < 1e-10
    svals = np.linalg.svd(wirt.reduced, compute_uv=False)
    assert svals[-1] > 1e-6 * svals[0]


def test_wirtinger_relation_and_reduction(principal_g1):
    wirt = wirtinger_matrix(principal_g1, 2, 16)
    assert wirt.full.shape == (3, 6)
    assert wirt.reduced.shape == (3, 3)
    assert wirt.relation_residual < 1e-10
    # reduced columns are exactly the beta' = n t / (n(n+1)) columns
    assert np.array_equal(wirt.reduced, wirt.full[:, [0, 2, 4]])


def test_wirtinger_cross_check_independent_expansion():
    # second route: expand u -> theta(u+v) theta~(u-v) in the level-2 basis at
    # fixed sampled v, then solve for the coefficient matrix in the v-basis
    pav = validate_polarized(np.array([[1j]]), (1,), simple_asserted=True)
    n = 1
    wirt = wirtinger_matrix(pav, n, 21)
    basis1 = ThetaBasis(pav, 1)
    basis2 = ThetaBasis(pav, 2)
    tilde = ThetaTilde(pav, 1)
    rng = np.random.default_rng(55)
    vs = rng.random((6, 1)) @ pav.matrix.T + rng.random((6, 1))
    coeff_rows = []
    for v in vs:
        samples = sample_points(pav, 2 * basis2.dim + 2, 77)
        exp = expand_in_basis(
            pav, 2,
            lambda zs, v=v: basis1.eval_matrix(zs + v)[0] * tilde.eval_many(zs - v),
            samples, basis=basis2,
        )
        coeff_rows.append(exp.coefficients)
    d_matrix = np.array(coeff_rows)  # (nv, KA): d_alpha(v) = sum_b c_{ab} theta_b(v)
    tb = basis2.eval_matrix(vs).T    # (nv, KB)
    c_indep = np.linalg.lstsq(tb, d_matrix, rcond=None)[0].T
    assert projective_residual(c_indep.ravel(), wirt.full.ravel()) < 1e-8


def test_phi_map_coords_properties(principal_g1):
    n = 2
    rng = np.random.default_rng(31)
    zero = phi_map_coords(principal_g1, n, zero_point(principal_g1), 41)
    tilde = ThetaTilde(principal_g1, n)
    basis1 = ThetaBasis(principal_g1, 1)
    samples = sample_points(principal_g1, 2 * principal_g1.h0(n + 1), 41)
    direct = expand_in_basis(
        principal_g1, n + 1,
        lambda zs: basis1.eval_matrix(zs)[0] * tilde.eval_many(zs),
        samples,
    )
    assert np.allclose(zero.coefficients, direct.coefficients, atol=1e-9)
    for trial in range(20):
        b = rng.random(1) @ principal_g1.matrix.T + rng.random(1)
        coords = phi_map_coords(principal_g1, n, b, 41)
        assert np.linalg.norm(coords.coefficients) > 1e-6
    # coordinates depend on b only mod Lambda (projectively)
    b = np.array([0.31 + 0.17j])
    lam = principal_g1.lattice_vector([1], [2])
    c1 = phi_map_coords(principal_g1, n, b, 41).coefficients
    c2 = phi_map_coords(principal_g1, n, b + lam, 41).coefficients
    assert projective_residual(c1, c2) < 1e-8


def test_diagram_check_cases(principal_g1):
    n = 2
    wirt = wirtinger_matrix(principal_g1, n, 16)
    rng = np.random.default_rng(61)
    for _ in range(5):
        b = rng.random(1) @ principal_g1.matrix.T + rng.random(1)
        assert diagram_check(principal_g1, n, b, 16, wirt=wirt) < 1e-8
    assert diagram_check(principal_g1, n, np.zeros(1), 16, wirt=wirt) < 1e-8


def test_diagram_projectivity():
    x = np.array([1.0 + 1j, 2.0, 3.0])
    y = np.array([0.5 + 0.1j, 1.1, 2.9])
    assert projective_residual(x, 7 * y) == pytest.approx(projective_residual(x, y), rel=1e-12)
    assert projective_residual(x, (2 - 3j) * x) < 1e-15


def test_spanning_trivial_group(principal_g1):
    report = spanning_check(principal_g1, 2, [zero_point(principal_g1)])
    assert report.rank == 1
    assert report.required_rank == 3


def test_spanning_elliptic_tenth_torsion(principal_g1):
    report = spanning_check(principal_g1, 2, 10)
    assert report.npoints == 100
    assert report.rank == report.required_rank == 3


def test_spanning_surface_seventh_torsion(principal_g2):
    report = spanning_check(principal_g2, 1, 7)
    assert report.npoints == 2401
    assert report.rank == report.required_rank == 4


def test_monotonicity_elliptic():
    for divisors, omega_seed in (((3,), 101), ((4,), 102)):
        pav = validate_polarized(random_period_matrix(1, omega_seed), divisors, True)
        v1 = surjectivity_verdict(pav, 1, 11)
        assert v1.verdict is Verdict.SURJECTIVE
        assert monotonicity_check(pav, 1, 11)


def test_monotonicity_vacuous(principal_g2):
    assert monotonicity_check(principal_g2, 1, 13)


def test_mu_reseeds_on_ill_conditioning(elliptic_d3):
    with pytest.raises(IllConditioned):
        mu_matrix(elliptic_d3, 1, 11, cond_cap=1.0)


def test_size_caps(elliptic_d3, principal_g1, principal_g2):
    from thetamu import SizeLimit

    with pytest.raises(SizeLimit):
        mu_matrix(elliptic_d3, 1, 11, cell_cap=10)
    with pytest.raises(SizeLimit):
        wirtinger_matrix(principal_g1, 2, 16, unknown_cap=4)
    with pytest.raises(SizeLimit):
        spanning_check(principal_g2, 1, 7, point_cap=100)


def test_weighted_sampling_keeps_design_bounded(elliptic_d3):
    basis = ThetaBasis(elliptic_d3, 2)
    samples = sample_points(elliptic_d3, 2 * basis.dim, 3)
    design = basis.eval_matrix(samples.z) * section_weights(elliptic_d3, 2, samples.z)
    assert np.abs(design).max() < 50.0
