"""Worked examples with closed-form answers, replayable as residual checks.

Every constructor returns plain data (seeds or tuples); every check
recomputes a closed-form identity through the library pipeline and
returns the worst residual, so the whole battery doubles as an
end-to-end regression suite for the evaluation conventions.
"""

from __future__ import annotations

import numpy as np

from .clark import ClarkSeed, clark_family, minratreal_fm
from .errors import DomainError
from .nc_linalg import (
    MatrixTuple,
    adjoint_tuple,
    is_column_isometry,
    is_irreducible,
    random_tuple,
    restrict_tuple,
    row_norm,
)
from .realization import transfer_eval
from .singularity import commutator_det


def _E(i: int, j: int, n: int) -> np.ndarray:
    M = np.zeros((n, n), dtype=complex)
    M[i - 1, j - 1] = 1.0
    return M


def matrix_unit_seed(x=None) -> ClarkSeed:
    """2x2 row co-isometry (E12, E21); x = e1 gives b = Z2 Z1, x = e2 gives Z1 Z2."""
    T = MatrixTuple((_E(1, 2, 2), _E(2, 1, 2)))
    if x is None:
        x = np.array([1.0, 0.0])
    return ClarkSeed(T=T, x=np.asarray(x, dtype=complex))


def anticommuting_seed(alpha: complex, beta: complex) -> ClarkSeed:
    """Anti-commuting unitaries over sqrt(2) with x = (alpha, beta).

    alpha = beta = 1/sqrt(2) gives b = (Z1 + Z2)(Z1 - Z2)/2; alpha = 0,
    beta = 1 gives b = -Z2 (I - Z1/sqrt(2))^{-1} Z2 / 2 - Z1/sqrt(2).
    """
    T1 = np.array([[1.0, 0.0], [0.0, -1.0]]) / np.sqrt(2.0)
    T2 = np.array([[0.0, 1.0], [-1.0, 0.0]]) / np.sqrt(2.0)
    return ClarkSeed(T=MatrixTuple((T1, T2)), x=np.array([alpha, beta], dtype=complex))


def two_dim_family_seed() -> ClarkSeed:
    """Diagonal-projection pair with x = (1,1)/sqrt(2); two-atom measure."""
    T = MatrixTuple((np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)))
    return ClarkSeed(T=T, x=np.array([1.0, 1.0]) / np.sqrt(2.0))


def four_dim_family_seed() -> ClarkSeed:
    """4x4 row co-isometry whose perturbation family is reducible only at 1 and -1."""
    T1s = _E(2, 1, 4) + _E(4, 3, 4)
    T2s = _E(2, 2, 4) + _E(3, 4, 4)
    T = MatrixTuple((T1s.conj().T, T2s.conj().T))
    return ClarkSeed(T=T, x=0.5 * np.ones(4, dtype=complex))


def three_dim_column_isometry() -> MatrixTuple:
    """Irreducible column isometry (E12, E21/sqrt(2), E13, E31/sqrt(2)).

    For this 4-tuple, sum_j kron(T*_j, Z_j) is singular for every Z.
    """
    r = 1.0 / np.sqrt(2.0)
    return MatrixTuple((_E(1, 2, 3), r * _E(2, 1, 3), _E(1, 3, 3), r * _E(3, 1, 3)))


def _sample_contractions(d: int, prng_seed: int, count: int = 5, n: int = 3, target: float = 0.6):
    rng = np.random.default_rng(prng_seed)
    out = []
    for _ in range(count):
        Z = random_tuple(d, n, rng)
        out.append(MatrixTuple(tuple((target / row_norm(Z)) * z for z in Z)))
    return out


def _multiplier_residual(seed: ClarkSeed, closed_form, prng_seed: int) -> float:
    fm = minratreal_fm(seed)
    worst = 0.0
    for Z in _sample_contractions(seed.d, prng_seed):
        dev = np.linalg.norm(transfer_eval(fm, Z) - closed_form(Z))
        worst = max(worst, float(dev))
    return worst


def check_matrix_unit_e1(prng_seed: int = 0) -> float:
    return _multiplier_residual(
        matrix_unit_seed(np.array([1.0, 0.0])), lambda Z: Z[1] @ Z[0], prng_seed
    )


def check_matrix_unit_e2(prng_seed: int = 0) -> float:
    return _multiplier_residual(
        matrix_unit_seed(np.array([0.0, 1.0])), lambda Z: Z[0] @ Z[1], prng_seed
    )


def check_anticommuting_balanced(prng_seed: int = 0) -> float:
    r = 1.0 / np.sqrt(2.0)
    return _multiplier_residual(
        anticommuting_seed(r, r), lambda Z: 0.5 * (Z[0] + Z[1]) @ (Z[0] - Z[1]), prng_seed
    )


def check_anticommuting_axis(prng_seed: int = 0) -> float:
    r = 1.0 / np.sqrt(2.0)

    def closed(Z):
        n = Z.n
        inner = np.linalg.solve(np.eye(n) - r * Z[0], Z[1])
        return -0.5 * Z[1] @ inner - r * Z[0]

    return _multiplier_residual(anticommuting_seed(0.0, 1.0), closed, prng_seed)


def check_two_dim_family_matrices(prng_seed: int = 0) -> float:
    seed = two_dim_family_seed()
    worst = 0.0
    for k in range(8):
        z = np.exp(2j * np.pi * (k + 0.31) / 8)
        S = clark_family(seed, z)
        M1 = np.array([[(z + 1) / 2, (z - 1) / 2], [0, 0]])
        M2 = np.array([[0, 0], [(z - 1) / 2, (z + 1) / 2]])
        worst = max(worst, float(np.linalg.norm(S[0] - M1) + np.linalg.norm(S[1] - M2)))
    return worst


def check_two_dim_commutator_det(prng_seed: int = 0) -> float:
    seed = two_dim_family_seed()
    coeffs = commutator_det(lambda lam: clark_family(seed, lam))
    target = [0.0, 0.25, -0.5, 0.25]
    coeffs = coeffs + [0.0] * (len(target) - len(coeffs))
    return float(max(abs(c - t) for c, t in zip(coeffs, target)))


def check_four_dim_family_matrices(prng_seed: int = 0) -> float:
    seed = four_dim_family_seed()
    worst = 0.0
    for k in range(8):
        z = np.exp(2j * np.pi * (k + 0.31) / 8)
        w = (z - 1) / 4
        S = clark_family(seed, z)
        M1 = np.zeros((4, 4), dtype=complex)
        M1[1] = [w + 1, w, w, w]
        M1[3] = [w, w, w + 1, w]
        M2 = np.zeros((4, 4), dtype=complex)
        M2[1] = [w, w + 1, w, w]
        M2[2] = [w, w, w, w + 1]
        worst = max(worst, float(np.linalg.norm(S[0] - M1) + np.linalg.norm(S[1] - M2)))
    return worst


def check_four_dim_commutator_det_on_V(prng_seed: int = 0) -> float:
    seed = four_dim_family_seed()
    Q = np.zeros((4, 3))
    Q[1, 0] = Q[2, 1] = Q[3, 2] = 1.0
    coeffs = commutator_det(lambda lam: restrict_tuple(clark_family(seed, lam), Q))
    # -2 w^2 (2w + 1) with w = (z-1)/4, expanded in z
    target = [-1.0 / 16, 1.0 / 16, 1.0 / 16, -1.0 / 16]
    coeffs = coeffs + [0.0] * (len(target) - len(coeffs))
    return float(max(abs(c - t) for c, t in zip(coeffs, target)))


def check_family_traces(prng_seed: int = 0) -> float:
    s2, s4 = two_dim_family_seed(), four_dim_family_seed()
    worst = 0.0
    for k in range(8):
        z = np.exp(2j * np.pi * (k + 0.17) / 8)
        worst = max(worst, abs(np.trace(clark_family(s2, z)[0]) - (z + 1) / 2))
        worst = max(worst, abs(np.trace(clark_family(s4, z)[0]) - (z - 1) / 2))
    return float(worst)


def check_family_transition_unitary(prng_seed: int = 0) -> float:
    """T(zeta)* = T(xi)* (I + (zeta/xi - 1) xx*), with determinant zeta conj(xi)."""
    worst = 0.0
    for seed in (two_dim_family_seed(), four_dim_family_seed()):
        x = seed.x
        for zeta, xi in ((1j, 1.0), (np.exp(0.4j), np.exp(-1.1j)), (-1.0, 1j)):
            V = np.eye(seed.m) + (zeta / xi - 1.0) * np.outer(x, x.conj())
            Sz = clark_family(seed, zeta)
            Sx = clark_family(seed, xi)
            dev = max(np.linalg.norm(Sz[k] - Sx[k] @ V) for k in range(seed.d))
            dev = max(dev, abs(np.linalg.det(V) - zeta * np.conj(xi)))
            dev = max(dev, np.linalg.norm(V @ V.conj().T - np.eye(seed.m)))
            worst = max(worst, float(dev))
    return worst


def check_three_dim_pencil_singular(prng_seed: int = 0) -> float:
    Tstar = three_dim_column_isometry()
    if not is_column_isometry(Tstar):
        return 1.0
    if not is_irreducible(adjoint_tuple(Tstar)):
        return 1.0
    rng = np.random.default_rng(prng_seed)
    worst = 0.0
    for n in (2, 3, 4):
        for _ in range(4):
            Z = random_tuple(Tstar.d, n, rng)
            M = sum(np.kron(t, z) for t, z in zip(Tstar, Z))
            worst = max(worst, float(abs(np.linalg.det(M))))
    return worst


def check_four_dim_minimal_piece_at_minus_one(prng_seed: int = 0) -> float:
    S = clark_family(four_dim_family_seed(), -1.0)
    v = np.zeros(4, dtype=complex)
    v[1] = v[3] = 1.0 / np.sqrt(2.0)
    r1 = np.linalg.norm(S[0] @ v + v)  # eigenvalue -1
    r2 = np.linalg.norm(S[1] @ v)  # eigenvalue 0
    return float(max(r1, r2))


REGISTRY = {
    "matrix-unit-e1": (check_matrix_unit_e1, 1e-10),
    "matrix-unit-e2": (check_matrix_unit_e2, 1e-10),
    "anticommuting-balanced": (check_anticommuting_balanced, 1e-10),
    "anticommuting-axis": (check_anticommuting_axis, 1e-10),
    "two-dim-family-matrices": (check_two_dim_family_matrices, 1e-12),
    "two-dim-commutator-det": (check_two_dim_commutator_det, 1e-12),
    "four-dim-family-matrices": (check_four_dim_family_matrices, 1e-12),
    "four-dim-commutator-det-on-V": (check_four_dim_commutator_det_on_V, 1e-12),
    "family-traces": (check_family_traces, 1e-12),
    "family-transition-unitary": (check_family_transition_unitary, 1e-10),
    "three-dim-pencil-singular": (check_three_dim_pencil_singular, 1e-10),
    "four-dim-minimal-piece": (check_four_dim_minimal_piece_at_minus_one, 1e-12),
}


def run_all(prng_seed: int = 0, names=None) -> list[dict]:
    chosen = names if names is not None else sorted(REGISTRY)
    out = []
    for name in chosen:
        if name not in REGISTRY:
            raise DomainError(f"unknown check {name!r}; known: {', '.join(sorted(REGISTRY))}")
        fn, tol = REGISTRY[name]
        residual = fn(prng_seed)
        out.append(
            {"name": name, "residual": float(residual), "tol": tol, "pass": bool(residual <= tol)}
        )
    return out
