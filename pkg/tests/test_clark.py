import numpy as np
import pytest

from ncclark import (
    ClarkSeed,
    MatrixTuple,
    PreconditionError,
    adjoint_tuple,
    cayley,
    clark_family,
    classify,
    coefficients,
    herglotz_eval,
    inner_certificate,
    is_row_coisometry,
    minratreal_fm,
    moebius_normalize,
    moments,
    transfer_eval,
)
from ncclark.clark import b_zero, cyclicity_report, herglotz_descriptor
from ncclark.nc_linalg import random_row_contraction
from ncclark.realization import fm_const, fm_from_descriptor, words_of_length
from ncclark.reproduce import matrix_unit_seed, two_dim_family_seed

from _support import coisometry_seed, contraction_seed, cyclic_seed, strict_tuple, unit_vector


def test_seed_validation():
    rng = np.random.default_rng(0)
    T = random_row_contraction(2, 3, rng, row=0.9)
    with pytest.raises(PreconditionError):
        ClarkSeed(T, np.zeros(3))
    with pytest.raises(PreconditionError):
        ClarkSeed(T, np.ones(2))
    big = MatrixTuple(tuple(3.0 * a for a in T))
    with pytest.raises(PreconditionError):
        ClarkSeed(big, unit_vector(3, rng))


def test_b_zero_closed_form():
    rng = np.random.default_rng(1)
    for t in (-1.3, 0.0, 0.4):
        seed = contraction_seed(2, 3, rng, t=t)
        assert abs(b_zero(seed) - 1j * t / (2 + 1j * t)) <= 1e-12


def test_herglotz_coefficients_are_doubled_moments():
    # The descriptor route and the moment functional encode the same
    # measure: G's coefficient at w is <x, T*^w x> = conj(mu(reverse w)).
    rng = np.random.default_rng(2)
    seed = contraction_seed(2, 3, rng, t=0.7)
    fm = fm_from_descriptor(herglotz_descriptor(seed))
    c = coefficients(fm, 3)
    words = [w for k in range(4) for w in words_of_length(2, k)]
    mu = moments(seed, words)
    assert abs(mu[()] - 1.0) <= 1e-12
    for w in words:
        if w:
            assert abs(c[w] - np.conj(mu[tuple(reversed(w))])) <= 1e-11


def test_minratreal_transfer_equals_cayley():
    rng = np.random.default_rng(3)
    for k in range(8):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        t = 0.0 if k % 2 == 0 else float(rng.standard_normal())
        seed = (coisometry_seed if k % 3 == 0 else contraction_seed)(d, n, rng, t=t)
        try:
            fm = minratreal_fm(seed)
        except PreconditionError:
            continue  # x happened to be non-cyclic for T*
        for _ in range(3):
            Z = strict_tuple(d, 3, rng)
            assert np.linalg.norm(transfer_eval(fm, Z) - cayley(seed, Z)) <= 1e-9


def test_minratreal_needs_cyclic_vector():
    rng = np.random.default_rng(4)
    blk = coisometry_seed(2, 2, rng)
    T = MatrixTuple(
        tuple(
            np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), a]]) for a in blk.T
        )
    )
    x = np.concatenate([blk.x, np.zeros(2)])
    with pytest.raises(PreconditionError):
        minratreal_fm(ClarkSeed(T, x))


def test_clark_family_basics():
    seed = two_dim_family_seed()
    S1 = clark_family(seed, 1.0)
    assert max(np.linalg.norm(s - t.conj().T) for s, t in zip(S1, seed.T)) == 0.0
    for lam in (1j, np.exp(0.3j), -1.0):
        fam = clark_family(seed, lam)
        assert is_row_coisometry(adjoint_tuple(fam), tol=1e-12)
    rng = np.random.default_rng(5)
    shifted = contraction_seed(2, 3, rng, t=0.5)
    with pytest.raises(PreconditionError):
        clark_family(shifted, 1j)


def test_herglotz_positive_and_cayley_contractive():
    rng = np.random.default_rng(6)
    for k in range(30):
        d, n = int(rng.integers(1, 4)), int(rng.integers(2, 5))
        seed = (coisometry_seed if k % 2 else contraction_seed)(
            d, n, rng, t=float(rng.standard_normal())
        )
        Z = strict_tuple(d, int(rng.integers(1, 4)), rng, radius=0.75)
        H = herglotz_eval(seed, Z)
        assert float(np.min(np.linalg.eigvalsh((H + H.conj().T) / 2))) >= -1e-10
        assert np.linalg.norm(cayley(seed, Z), 2) <= 1 + 1e-9
    with pytest.raises(PreconditionError):
        herglotz_eval(matrix_unit_seed(), strict_tuple(2, 2, rng, radius=1.1))


def test_moebius_normalize_kills_constant_and_keeps_inner():
    rng = np.random.default_rng(7)
    seed = cyclic_seed(coisometry_seed, 2, 3, rng, t=0.8)
    fm = minratreal_fm(seed)
    assert abs(fm.D) > 1e-3  # t shifts b(0) off zero
    out = moebius_normalize(fm)
    assert abs(out["fm0"].D) <= 1e-10
    assert abs(out["w"] - b_zero(seed)) <= 1e-10
    assert inner_certificate(fm)["inner"] and inner_certificate(out["fm0"])["inner"]

    soft = minratreal_fm(cyclic_seed(contraction_seed, 2, 3, rng, t=0.6))
    out = moebius_normalize(soft)
    assert abs(out["fm0"].D) <= 1e-10
    assert not inner_certificate(out["fm0"])["inner"]

    with pytest.raises(PreconditionError):
        moebius_normalize(fm_const(2.0, 2))


def test_cyclicity_report():
    rep = cyclicity_report(matrix_unit_seed())
    assert rep == {"tstar_cyclic": True, "t_cyclic": True, "v_cyclic": True}
    rng = np.random.default_rng(8)
    rep = cyclicity_report(contraction_seed(2, 3, rng))
    assert rep["v_cyclic"] is None


def test_classify_singular_family_seed():
    rep = classify(two_dim_family_seed())
    assert rep["singular"] and rep["pure_rank"] == 0
    assert rep["piece_dims"] == [1, 1] and rep["ktilde_dim"] == 2
    assert not rep["ac_part_present"]
    assert not rep["von_neumann_part_present"] and not rep["ac_cuntz_part_present"]


def test_classify_pure_seed():
    rng = np.random.default_rng(9)
    rep = classify(cyclic_seed(contraction_seed, 2, 3, rng))
    assert not rep["singular"] and rep["pure_rank"] == 3
    assert rep["piece_dims"] == [] and rep["ac_part_present"]
