import numpy as np
import pytest

from ncclark import (
    ClarkSeed,
    MatrixTuple,
    PreconditionError,
    adjoint_tuple,
    boundary_eigencheck,
    boundary_limit,
    clark_family,
    coisometric_restrictions,
    commutator_det,
    det_splitting,
    minratreal_fm,
    mutual_singularity,
    ncAD_report,
    similarity_locus,
    trace_perturbation_polys,
    transfer_eval,
    transpose_tuple,
)
from ncclark.nc_linalg import is_row_coisometry, random_row_contraction
from ncclark.reproduce import (
    four_dim_family_seed,
    matrix_unit_seed,
    two_dim_family_seed,
)

from _support import coisometry_seed, strict_tuple, unit_vector


def _family_tuple(seed, zeta):
    # the perturbation whose Clark measure sits at zeta
    return adjoint_tuple(clark_family(seed, np.conj(zeta)))


def test_restriction_pieces_are_invariant_coisometries():
    rng = np.random.default_rng(0)
    for k in range(6):
        d, n = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        seed = coisometry_seed(d, n, rng)
        zeta = np.exp(2j * np.pi * rng.uniform())
        A = _family_tuple(seed, zeta)
        rep = coisometric_restrictions(A)
        dims = 0
        for Q, F in rep["pieces"]:
            dims += Q.shape[1]
            assert is_row_coisometry(F, tol=1e-7)
            resid = max(
                np.linalg.norm(a.conj().T @ Q - Q @ (Q.conj().T @ a.conj().T @ Q))
                for a in A
            )
            assert resid <= 1e-10
        assert dims == rep["ktilde"].shape[1]


def test_restrictions_on_the_two_dim_family():
    seed = two_dim_family_seed()
    rep = coisometric_restrictions(adjoint_tuple(clark_family(seed, 1.0)))
    assert sorted(Q.shape[1] for Q, _ in rep["pieces"]) == [1, 1]
    rep = coisometric_restrictions(_family_tuple(seed, np.exp(0.4j)))
    assert [Q.shape[1] for Q, _ in rep["pieces"]] == [2]


def test_restrictions_require_contraction():
    rng = np.random.default_rng(1)
    big = MatrixTuple(tuple(2.0 * a for a in random_row_contraction(2, 3, rng)))
    with pytest.raises(PreconditionError):
        coisometric_restrictions(big)


def test_boundary_eigencheck_families():
    for seed in (two_dim_family_seed(), four_dim_family_seed()):
        for k in range(1, 6):
            zeta = np.exp(2j * np.pi * k / 7)
            rep = boundary_eigencheck(seed, zeta)
            assert rep["n_pieces"] >= 1
            for piece in rep["pieces"]:
                assert piece["ok"] and piece["eig_distance"] <= 1e-8
            assert rep["full"]["ok"]


def test_boundary_eigencheck_multiplicity_on_block_seed():
    s1 = matrix_unit_seed()
    s2 = matrix_unit_seed(x=np.array([0.0, 1.0]))
    T = MatrixTuple(
        tuple(
            np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), b]])
            for a, b in zip(s1.T, s2.T)
        )
    )
    x = np.concatenate([s1.x, s2.x]) / np.sqrt(2)
    rep = boundary_eigencheck(ClarkSeed(T, x), 1.0)
    assert rep["n_pieces"] == 2
    assert rep["full"]["geometric_multiplicity"] >= 2
    assert rep["gm_at_least_pieces"]


def test_det_splitting_random_draws():
    rng = np.random.default_rng(2)
    for k in range(12):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        T = (
            coisometry_seed(d, n, rng).T
            if k % 2 == 0
            else random_row_contraction(d, n, rng, row=0.9)
        )
        seed = ClarkSeed(T, unit_vector(n, rng))
        zeta = np.exp(2j * np.pi * rng.uniform())
        Z = strict_tuple(d, int(rng.integers(1, 4)), rng, radius=0.3)
        assert det_splitting(seed, zeta, Z)["rel_err"] <= 1e-8


def test_boundary_limit_radial_convergence():
    seed = two_dim_family_seed()
    fm = minratreal_fm(seed)
    zeta = np.exp(0.7j)
    A = _family_tuple(seed, zeta)
    M1 = transfer_eval(fm, transpose_tuple(A)).T
    evals, vecs = np.linalg.eig(M1)
    v = vecs[:, int(np.argmin(np.abs(evals - zeta)))]
    rep = boundary_limit(fm, A, v, v)
    assert abs(rep["zeta"] - zeta) <= 1e-10
    assert rep["cauchy_converged"]
    assert abs(rep["values"][-1] - zeta) <= 1e-4
    # kernel bound stabilizes at ||v||^2 = 1
    assert abs(rep["kernel_norms_sq"][-1] - 1.0) <= 1e-4
    with pytest.raises(PreconditionError):
        boundary_limit(fm, A, v, unit_vector(2, np.random.default_rng(3)))


def test_trace_polys_closed_form_and_numeric_oracle():
    A = matrix_unit_seed().T
    x = np.array([1.0, 0.0])
    rep = trace_perturbation_polys(A, x, max_len=4)
    assert np.allclose(rep["defects"], 0)
    assert np.allclose(rep["polys"][(1, 2)], [1.0])
    rng = np.random.default_rng(4)
    B = random_row_contraction(2, 3, rng)
    y = unit_vector(3, rng)
    rep = trace_perturbation_polys(B, y, max_len=4)
    for w, coeffs in rep["polys"].items():
        if not len(w):
            continue
        for z in (0.3, -1.2, 0.5j):
            Bz = MatrixTuple(tuple(b @ (np.eye(3) + z * np.outer(y, y.conj())) for b in B))
            words_val = np.trace(np.linalg.multi_dot([Bz[j - 1] for j in w] + [np.eye(3)]))
            base = np.trace(np.linalg.multi_dot([B[j - 1] for j in w] + [np.eye(3)]))
            want = (words_val - base) / z
            got = sum(c * z**k for k, c in enumerate(coeffs))
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_similarity_locus_trivial_for_matrix_units():
    A = matrix_unit_seed().T
    rep = similarity_locus(A, np.array([1.0, 0.0]), samples=8)
    assert rep["hits"] == 0
    assert not rep["corollary_triggered"] and not rep["all_similar_verdict"]
    assert not rep["contradiction"]


def test_similarity_locus_preconditions():
    A = matrix_unit_seed().T
    with pytest.raises(PreconditionError):
        similarity_locus(A, np.zeros(2))
    red = MatrixTuple((np.diag([1.0, 2.0]), np.diag([3.0, 4.0])))
    with pytest.raises(PreconditionError):
        similarity_locus(red, np.array([1.0, 0.0]))


def test_mutual_singularity_two_dim_family():
    seed = two_dim_family_seed()
    rep = mutual_singularity(seed, 1.0, 1j)
    assert rep["mutually_singular"]
    same = mutual_singularity(seed, 1j, 1j)
    assert not same["mutually_singular"] and same["equivalent_pair"] is not None


def test_ncad_report_two_dim_family():
    rep = ncAD_report(two_dim_family_seed())
    assert rep["guarantee_holds"]
    assert rep["inner"] and rep["level1_nonzero"]
    assert rep["orbit_dim"] == 2 and len(rep["points"]) == 3
    assert all(rep["singular_to_all_others"])
    clause = rep["irreducible_point_clause"]
    assert clause["applies"] and clause["holds"]


def test_commutator_det_closed_forms():
    seed = two_dim_family_seed()
    coeffs = commutator_det(lambda lam: clark_family(seed, lam))
    assert np.allclose(coeffs, [0.0, 0.25, -0.5, 0.25], atol=1e-12)
