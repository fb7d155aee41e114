"""End-to-end acceptance battery.

One test per advertised guarantee, each at its pinned tolerance, so
``pytest -v`` reports one pass/fail line per guarantee.
"""

import numpy as np

from ncclark import ClarkSeed, MatrixTuple
from ncclark.clark import (
    b_zero,
    cayley,
    clark_family,
    herglotz_eval,
    minratreal_fm,
    moebius_normalize,
)
from ncclark.fock import inner_certificate, truncated_gram
from ncclark.nc_expr import parse
from ncclark.nc_linalg import (
    beurling_estimate,
    is_row_coisometry,
    joint_spectral_radius,
    random_row_coisometry,
    random_tuple,
    restrict_tuple,
)
from ncclark.realization import (
    char_poly_via_pencil,
    coefficient_norms_sq,
    expr_to_fm,
    fm_add,
    fm_const,
    fm_inv,
    fm_mul,
    fm_scale,
    fock_membership,
    minimize,
    transfer_eval,
)
from ncclark.reproduce import (
    anticommuting_seed,
    four_dim_family_seed,
    matrix_unit_seed,
    two_dim_family_seed,
)
from ncclark.singularity import (
    boundary_eigencheck,
    commutator_det,
    det_splitting,
    mutual_singularity,
    ncAD_report,
)
from ncclark.sl_det import det_constancy_direct, sample_points, sl_condition_check

from _support import (
    coisometry_seed,
    contraction_seed,
    cyclic_seed,
    random_fm,
    strict_tuple,
)


def test_c01_matrix_unit_seeds_give_quadratic_multipliers():
    rng = np.random.default_rng(101)
    fm1 = minratreal_fm(matrix_unit_seed(np.array([1.0, 0.0])))
    fm2 = minratreal_fm(matrix_unit_seed(np.array([0.0, 1.0])))
    for _ in range(20):
        Z = strict_tuple(2, 3, rng, radius=float(rng.uniform(0.2, 0.95)))
        assert np.abs(transfer_eval(fm1, Z) - Z[1] @ Z[0]).max() < 1e-10
        assert np.abs(transfer_eval(fm2, Z) - Z[0] @ Z[1]).max() < 1e-10


def test_c02_anticommuting_multipliers_match_and_are_inner():
    rng = np.random.default_rng(102)
    r = 1.0 / np.sqrt(2.0)
    fm_bal = minratreal_fm(anticommuting_seed(r, r))
    fm_axis = minratreal_fm(anticommuting_seed(0.0, 1.0))
    for _ in range(20):
        Z = strict_tuple(2, 3, rng, radius=float(rng.uniform(0.2, 0.95)))
        bal = 0.5 * (Z[0] + Z[1]) @ (Z[0] - Z[1])
        assert np.abs(transfer_eval(fm_bal, Z) - bal).max() < 1e-10
        axis = -0.5 * Z[1] @ np.linalg.solve(np.eye(3) - r * Z[0], Z[1]) - r * Z[0]
        assert np.abs(transfer_eval(fm_axis, Z) - axis).max() < 1e-10
    assert inner_certificate(fm_bal)["inner"]
    assert inner_certificate(fm_axis)["inner"]


def test_c03_symmetric_matrix_unit_seed_matches_schur_formula():
    fm = minratreal_fm(matrix_unit_seed(np.array([1.0, 1.0]) / np.sqrt(2.0)))
    cert = inner_certificate(fm)
    assert cert["inner"] and abs(cert["h2"] - 1.0) < 1e-10 and cert["phi_norm"] < 1e-10
    rng = np.random.default_rng(103)
    for _ in range(10):
        Z = strict_tuple(2, 3, rng, radius=float(rng.uniform(0.2, 0.9)))
        Z1, Z2 = Z[0], Z[1]
        R1 = np.linalg.inv(np.eye(3) + Z1 / 2)
        S = np.eye(3) + Z2 / 2 - Z2 @ R1 @ Z1 / 4
        Si = np.linalg.inv(S)
        b = (
            Si @ Z2 / 2
            + R1 @ (Z1 / 4) @ Si @ Z2
            + Si @ (Z2 / 4) @ R1 @ Z1
            + R1 @ Z1 / 2
            + R1 @ Z1 @ Si @ Z2 @ R1 @ Z1 / 8
        )
        assert np.abs(transfer_eval(fm, Z) - b).max() < 1e-8


def test_c04_family_commutator_determinants_and_traces():
    s2, s4 = two_dim_family_seed(), four_dim_family_seed()
    got = commutator_det(lambda lam: clark_family(s2, lam))
    want = [0.0, 0.25, -0.5, 0.25]  # (1/4) z (z - 1)^2
    got = got + [0.0] * (len(want) - len(got))
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-12

    Q = np.zeros((4, 3))
    Q[1, 0] = Q[2, 1] = Q[3, 2] = 1.0
    got = commutator_det(lambda lam: restrict_tuple(clark_family(s4, lam), Q))
    want = [-1.0 / 16, 1.0 / 16, 1.0 / 16, -1.0 / 16]  # -2 w^2 (2w + 1), w = (z-1)/4
    got = got + [0.0] * (len(want) - len(got))
    assert max(abs(a - b) for a, b in zip(got, want)) < 1e-12

    for k in range(8):
        z = np.exp(2j * np.pi * (k + 0.13) / 8)
        assert abs(np.trace(clark_family(s2, z)[0]) - (z + 1) / 2) < 1e-12
        assert abs(np.trace(clark_family(s4, z)[0]) - (z - 1) / 2) < 1e-12


def test_c05_char_poly_pencil_identity_random_battery():
    rng = np.random.default_rng(105)
    lams = (1.0, -0.7, 1j, 0.3 - 2j, 2.5)
    for _ in range(100):
        d, m, n = int(rng.integers(1, 4)), int(rng.integers(1, 6)), int(rng.integers(1, 5))
        fm = minimize(random_fm(d, m, rng))
        Z = strict_tuple(d, n, rng, radius=0.5)
        for lam in lams:
            lhs = char_poly_via_pencil(fm, Z, lam)
            rhs = np.linalg.det((lam + fm.D) * np.eye(n) - transfer_eval(fm, Z))
            assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(rhs))


def test_c06_boundary_point_in_spectrum_with_multiplicity():
    for seed in (two_dim_family_seed(), four_dim_family_seed()):
        for k in range(1, 17):
            rep = boundary_eigencheck(seed, np.exp(2j * np.pi * k / 17))
            assert rep["full"]["ok"] and rep["full"]["eig_distance"] < 1e-8
            for piece in rep["pieces"]:
                assert piece["ok"] and piece["eig_distance"] < 1e-8

    s1 = matrix_unit_seed()
    s2 = matrix_unit_seed(x=np.array([0.0, 1.0]))
    T = MatrixTuple(
        tuple(
            np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), b]]) for a, b in zip(s1.T, s2.T)
        )
    )
    x = np.concatenate([s1.x, s2.x]) / np.sqrt(2)
    rep = boundary_eigencheck(ClarkSeed(T, x), 1.0)
    assert rep["n_pieces"] == 2
    assert rep["full"]["geometric_multiplicity"] >= rep["n_pieces"]
    assert rep["gm_at_least_pieces"]


def test_c07_determinant_splitting_random_draws():
    rng = np.random.default_rng(107)
    for k in range(50):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        seed = coisometry_seed(d, n, rng) if k % 2 == 0 else contraction_seed(d, n, rng)
        zeta = np.exp(2j * np.pi * rng.uniform())
        Z = strict_tuple(d, int(rng.integers(1, 4)), rng, radius=0.3)
        assert det_splitting(seed, zeta, Z)["rel_err"] <= 1e-8


def test_c08_membership_matches_coefficient_decay():
    rng = np.random.default_rng(20260814)
    kept = 0
    while kept < 50:
        d, m = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        target = float(rng.uniform(0.3, 1.6))
        if 0.85 < target < 1.1:
            continue
        fm = minimize(random_fm(d, m, rng, spr_target=target))
        if 0.85 < joint_spectral_radius(fm.A) < 1.1:
            continue
        s = coefficient_norms_sq(fm, 20)
        if s[20] == 0.0:
            decays = True
        elif s[10] == 0.0:
            decays = False
        else:
            decays = (s[20] / s[10]) ** 0.1 < 1.0
        assert fock_membership(fm)["member"] == decays
        kept += 1


def _commuting_normal_tuple(d, n, rng, target):
    # U D_j U* with a shared unitary; the Beurling iterate is exact here
    U = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
    D = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
    D *= target / np.sqrt((np.abs(D) ** 2).sum(axis=0).max())
    return MatrixTuple(tuple(U @ np.diag(D[j]) @ U.conj().T for j in range(d)))


def test_c09_spr_eigen_method_vs_beurling_iterate():
    rng = np.random.default_rng(109)
    for k in range(50):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 6))
        target = float(rng.uniform(0.2, 0.6))
        if k % 2 == 0:
            A = MatrixTuple(tuple(target * a for a in random_row_coisometry(d, n, rng)))
        else:
            A = _commuting_normal_tuple(d, n, rng, target)
        assert abs(beurling_estimate(A, 200) - joint_spectral_radius(A)) < 1e-3
    for _ in range(20):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        A = random_tuple(d, n, rng)
        Q1 = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
        Q2 = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
        S = Q1 @ np.diag(rng.uniform(0.5, 2.0, size=n)) @ Q2  # cond(S) <= 4
        B = MatrixTuple(tuple(S @ a @ np.linalg.inv(S) for a in A))
        spr = joint_spectral_radius(A)
        assert abs(joint_spectral_radius(B) - spr) <= 1e-8 * max(1.0, spr)


def test_c10_inner_certificate_oracle_equivalence():
    rng = np.random.default_rng(110)
    inner_count = 0
    for k in range(20):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        maker = coisometry_seed if k % 2 == 0 else contraction_seed
        seed = cyclic_seed(maker, d, n, rng)
        fm = minratreal_fm(seed)
        cert = inner_certificate(fm)["inner"]
        G = truncated_gram(fm, 4)
        gram_says = bool(np.linalg.norm(G - np.eye(G.shape[0]), 2) <= 1e-9)
        assert cert == gram_says
        assert cert == is_row_coisometry(seed.T)
        inner_count += int(cert)
    assert inner_count == 10


def test_c11_mutual_singularity_and_singular_point_guarantee():
    seed = two_dim_family_seed()
    pts = [np.exp(2j * np.pi * k / 8) for k in range(8)]
    for i in range(8):
        for j in range(i + 1, 8):
            assert mutual_singularity(seed, pts[i], pts[j])["mutually_singular"]
    rng = np.random.default_rng(111)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        s = cyclic_seed(coisometry_seed, 2, n, rng)
        assert ncAD_report(s)["guarantee_holds"]


def _compiled(text):
    return minimize(expr_to_fm(parse(text, 2), 2))


def test_c12_constant_determinant_trace_conditions():
    pts = []
    for n in (2, 3, 4):
        pts += sample_points(2, levels=(n,), per_level=6, radius=0.45, prng_seed=112)

    f = _compiled("(1 - x*y) * inv(1 - y*x)")
    rep = sl_condition_check(f, pts, 6)
    assert rep["holds"] and rep["max_residual"] < 1e-9
    assert det_constancy_direct(f, pts)["max_abs_dev"] < 1e-10

    r = _compiled("(x*y - y*x) * inv(2 - x*y - y*x)")
    one = fm_const(1.0, 2)
    h = minimize(fm_mul(fm_add(one, r), fm_inv(fm_add(one, fm_scale(r, -1.0)))))
    rep = sl_condition_check(h, pts, 6)
    assert rep["holds"]
    assert det_constancy_direct(h, pts)["max_abs_dev"] < 1e-9

    for text in ("1 + z1", "inv(1 - z1)", "1 + x*y - y*x"):
        g = _compiled(text)
        assert not sl_condition_check(g, pts, 6)["holds"]
        assert det_constancy_direct(g, pts)["max_abs_dev"] > 1e-6


def test_c13_herglotz_positivity_and_cayley_contractivity():
    rng = np.random.default_rng(113)
    for k in range(200):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        maker = coisometry_seed if k % 2 == 0 else contraction_seed
        seed = maker(d, n, rng, t=float(rng.uniform(-1.0, 1.0)))
        Z = strict_tuple(d, int(rng.integers(1, 4)), rng, radius=float(rng.uniform(0.1, 0.85)))
        H = herglotz_eval(seed, Z)
        assert float(np.linalg.eigvalsh((H + H.conj().T) / 2).min()) >= -1e-10
        assert np.linalg.norm(cayley(seed, Z), 2) <= 1 + 1e-9


def test_c14_moebius_normalization_centers_and_preserves_inner():
    rng = np.random.default_rng(114)
    for k in range(20):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        t = float(rng.uniform(0.2, 1.0)) * (1 if k % 4 < 2 else -1)
        maker = coisometry_seed if k % 2 == 0 else contraction_seed
        seed = cyclic_seed(maker, d, n, rng, t=t)
        fm = minratreal_fm(seed)
        before = inner_certificate(fm)["inner"]
        out = moebius_normalize(fm)
        assert abs(out["fm0"].D) < 1e-10
        assert abs(out["w"] - b_zero(seed)) < 1e-12
        assert inner_certificate(out["fm0"])["inner"] == before
        assert before == (k % 2 == 0)
