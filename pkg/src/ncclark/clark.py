"""Finitely-correlated NC Clark measures.

A seed (T, x, t) with T a row contraction on C^m and x != 0 carries the
positive NC measure mu(L^w) = <x, T^w x>, its Herglotz transform, the
contractive multiplier b obtained by Cayley transform, the minimal FM
realization of b, and the Clark perturbation family T(zeta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .nc_linalg import (
    DEFAULT_TOL,
    MatrixTuple,
    adjoint_tuple,
    is_row_coisometry,
    is_row_contraction,
    krylov_span,
    largest_invariant_in,
    minimal_invariant_decomposition,
    orth_columns,
    row_norm,
    solve_checked,
    word_eval,
)
from .realization import (
    DescriptorRealization,
    FMRealization,
    descriptor_eval,
    fm_add,
    fm_const,
    fm_inv,
    fm_mul,
    fm_scale,
    minimize,
)


@dataclass(frozen=True, eq=False)
class ClarkSeed:
    """Seed data (T, x, t): row contraction, vector, real Herglotz offset."""

    T: MatrixTuple
    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        x = np.array(self.x, dtype=complex).reshape(-1)
        if x.shape != (self.T.n,):
            raise PreconditionError("x must live on the state space of T")
        if np.linalg.norm(x) == 0:
            raise PreconditionError("x must be nonzero")
        if not is_row_contraction(self.T, tol=1e-8):
            raise PreconditionError("T must be a row contraction")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    @property
    def m(self) -> int:
        return self.T.n

    @property
    def d(self) -> int:
        return self.T.d


def b_zero(seed: ClarkSeed) -> complex:
    """b(0) = (|x|^2 + it - 1) / (|x|^2 + it + 1)."""
    s = np.linalg.norm(seed.x) ** 2 + 1j * seed.t
    return complex((s - 1.0) / (s + 1.0))


def moments(seed: ClarkSeed, word_list) -> dict:
    """mu_{T,x}(L^w) = <x, T^w x> for each requested word."""
    return {
        tuple(w): complex(np.vdot(seed.x, word_eval(seed.T, tuple(w)) @ seed.x))
        for w in word_list
    }


def herglotz_descriptor(seed: ClarkSeed) -> DescriptorRealization:
    """Descriptor (T*, x, x) of the Cauchy-type transform G_mu."""
    return DescriptorRealization(adjoint_tuple(seed.T), seed.x, seed.x)


def herglotz_eval(seed: ClarkSeed, Z: MatrixTuple) -> np.ndarray:
    """H(Z) = 2 G_mu(Z) - G_mu(0) I + i t I on the strict row ball."""
    if not row_norm(Z) < 1.0:
        raise PreconditionError("herglotz_eval needs a strict row contraction Z")
    G = descriptor_eval(herglotz_descriptor(seed), Z)
    nx2 = float(np.linalg.norm(seed.x) ** 2)
    return 2.0 * G + (-nx2 + 1j * seed.t) * np.eye(Z.n)


def cayley(seed: ClarkSeed, Z: MatrixTuple) -> np.ndarray:
    """b(Z) = (H(Z) - I)(H(Z) + I)^{-1}; contractive since Re H >= 0."""
    H = herglotz_eval(seed, Z)
    eye = np.eye(Z.n)
    # the two factors commute, so a single solve is exact
    return solve_checked(H + eye, H - eye, what="Cayley denominator H + I")


def minratreal_fm(seed: ClarkSeed) -> FMRealization:
    """Minimal FM realization of the Clark multiplier b.

    State space H_0 = span{T*^w x : w nonempty}; with w0 = b(0),

        A_k = T_k*(I - (1 - w0) x x*)|_{H_0},   B_k = (1 - w0) T_k* x,
        C = (1 - w0) (P_{H_0} x)*,              D = w0.

    Requires x cyclic for T*.
    """
    T, x = seed.T, seed.x
    m = seed.m
    Tstar = adjoint_tuple(T)
    seeds = [ts @ x for ts in Tstar]
    Q = krylov_span(Tstar, seeds)
    full = orth_columns(np.column_stack([x.reshape(-1, 1), Q]))
    if full.shape[1] != m:
        raise PreconditionError("x is not cyclic for T*")
    w0 = b_zero(seed)
    perturb = np.eye(m) - (1.0 - w0) * np.outer(x, x.conj())
    A = MatrixTuple(tuple(Q.conj().T @ (ts @ perturb) @ Q for ts in Tstar))
    B = tuple((1.0 - w0) * (Q.conj().T @ s) for s in seeds)
    C = (1.0 - w0) * (Q.conj().T @ x).conj()
    return minimize(FMRealization(A, B, C, w0))


def clark_family(seed: ClarkSeed, lam: complex) -> MatrixTuple:
    """The perturbed tuple, starred: (T(lam)*)_k = T_k* ((I - xx*) + lam xx*).

    Needs b(0) = 0 (unit x, t = 0); lam = 1 returns T* exactly.
    """
    if abs(b_zero(seed)) > 1e-9:
        raise PreconditionError("clark_family needs a seed with b(0) = 0")
    x = seed.x
    m = seed.m
    move = np.eye(m) + (lam - 1.0) * np.outer(x, x.conj())
    return MatrixTuple(tuple(t.conj().T @ move for t in seed.T))


def moebius_normalize(fm: FMRealization, tol: float = DEFAULT_TOL) -> dict:
    """Left-compose with the Moebius map sending w = b(0) to 0.

    b0 = (b - w)(1 - conj(w) b)^{-1}; inner multipliers stay inner.
    """
    w = complex(fm.D)
    if not abs(w) < 1.0:
        raise PreconditionError("moebius_normalize needs |b(0)| < 1")
    d = fm.d
    num = fm_add(fm, fm_const(-w, d))
    den = fm_add(fm_const(1.0, d), fm_scale(fm, -np.conj(w)))
    fm0 = minimize(fm_mul(num, fm_inv(den)))
    return {"fm0": fm0, "w": w}


def cyclicity_report(seed: ClarkSeed) -> dict:
    """Krylov-rank cyclicity tests for T* and T.

    V-cyclicity (for the minimal isometric dilation) is decidable at this
    scale only when T is a row co-isometry, where it coincides with
    T-cyclicity; otherwise it is reported as None (undetermined).
    """
    m = seed.m
    tstar = krylov_span(adjoint_tuple(seed.T), [seed.x]).shape[1] == m
    t = krylov_span(seed.T, [seed.x]).shape[1] == m
    v = t if is_row_coisometry(seed.T) else None
    return {"tstar_cyclic": bool(tstar), "t_cyclic": bool(t), "v_cyclic": v}


def classify(seed: ClarkSeed, prng_seed: int = 0, tol: float = DEFAULT_TOL) -> dict:
    """GNS-type structure report of the Clark measure of the seed.

    pure_rank = rank(I - sum T_j T_j*) counts the absolutely continuous
    (type-L) part; the dilation summands are the minimal pieces of the
    largest T*-invariant subspace of ker(I - sum T_j T_j*).  Von Neumann
    and absolutely continuous Cuntz summands never occur for finitely
    correlated measures, so those flags are constants.
    """
    rep = cyclicity_report(seed)
    if not rep["tstar_cyclic"]:
        raise PreconditionError("classify needs x cyclic for T*")
    T = seed.T
    m = seed.m
    defect = np.eye(m) - sum(a @ a.conj().T for a in T)
    evals, V = np.linalg.eigh(defect)
    pure_rank = int(np.sum(np.abs(evals) > 1e-9))
    kerbasis = V[:, np.abs(evals) <= 1e-9]
    ktilde = largest_invariant_in(adjoint_tuple(T), kerbasis)
    pieces = (
        minimal_invariant_decomposition(adjoint_tuple(T), ktilde, prng_seed=prng_seed)
        if ktilde.shape[1]
        else []
    )
    return {
        "pure_rank": pure_rank,
        "singular": is_row_coisometry(T, tol=max(tol, 1e-9)),
        "dilation_summands": len(pieces),
        "piece_dims": [int(p.shape[1]) for p in pieces],
        "ktilde_dim": int(ktilde.shape[1]),
        "ac_part_present": bool(pure_rank > 0),
        "von_neumann_part_present": False,
        "ac_cuntz_part_present": False,
        "cyclicity": rep,
    }
