"""Truncated Fock space operators and exact inner-multiplier certificates.

The full Fock space H^2_d carries the left creation tuple L_1..L_d with
L_j* L_k = delta_jk I.  Finite sections over the graded-lexicographic
word basis give concrete matrices; the inner test itself is algebraic
(a Gramian certificate), with the truncated Gram matrix kept as a
brute-force oracle.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import PreconditionError
from .nc_linalg import DEFAULT_TOL, MatrixTuple, random_row_contraction, word_eval
from .realization import (
    FMRealization,
    fock_membership,
    minimize,
    observability_gramian,
    transfer_eval,
)


def words(d: int, N: int) -> list:
    """All words with |w| <= N, graded, lexicographic within each grade."""
    out = [()]
    for k in range(1, N + 1):
        out.extend(product(range(1, d + 1), repeat=k))
    return out


def word_index(d: int, N: int) -> dict:
    return {w: i for i, w in enumerate(words(d, N))}


def left_shift_matrices(d: int, N: int) -> MatrixTuple:
    """Compressions of the left shifts: e_w -> e_{kw}, dropping grade N+1."""
    basis = words(d, N)
    idx = {w: i for i, w in enumerate(basis)}
    size = len(basis)
    mats = []
    for k in range(1, d + 1):
        L = np.zeros((size, size), dtype=complex)
        for w in basis:
            if len(w) < N:
                L[idx[(k,) + w], idx[w]] = 1.0
        mats.append(L)
    return MatrixTuple(tuple(mats))


def multiplier_matrix(series: dict, d: int, N: int) -> np.ndarray:
    """Truncated left-multiplication matrix of a power series.

    Entry (u, v) is the coefficient at w when u = w . v, else zero.
    """
    basis = words(d, N)
    idx = {w: i for i, w in enumerate(basis)}
    size = len(basis)
    M = np.zeros((size, size), dtype=complex)
    for w, coeff in series.items():
        if coeff == 0:
            continue
        for v in basis:
            if len(w) + len(v) <= N:
                M[idx[tuple(w) + v], idx[v]] += coeff
    return M


def inner_certificate(fm: FMRealization, tol: float = DEFAULT_TOL) -> dict:
    """Exact isometry test for the left multiplier b(L).

    With W the observability Gramian, the Gram matrix of {b(L) e_v} has
    diagonal h^2 = |D|^2 + sum_j B_j* W B_j and off-diagonal entries
    driven by the row phi = conj(D) C + sum_k B_k* W A_k; by
    controllability of a minimal realization, b is inner iff h^2 = 1 and
    phi = 0.
    """
    if not fm.minimal:
        raise PreconditionError("inner_certificate needs a minimized realization")
    if not fock_membership(fm)["member"]:
        raise PreconditionError("inner_certificate needs a Fock-space member")
    if fm.m == 0:
        h2 = abs(fm.D) ** 2
        phi_norm = 0.0
    else:
        W = observability_gramian(fm)
        h2 = float(abs(fm.D) ** 2 + np.real(sum(np.vdot(b, W @ b) for b in fm.B)))
        phi = np.conj(fm.D) * fm.C + sum(b.conj() @ W @ a for b, a in zip(fm.B, fm.A))
        phi_norm = float(np.linalg.norm(phi))
    inner = bool(abs(h2 - 1.0) <= tol and phi_norm <= tol)
    return {"inner": inner, "h2": float(h2), "phi_norm": phi_norm}


def _gamma_row(fm: FMRealization, W: np.ndarray) -> np.ndarray:
    return np.conj(fm.D) * fm.C + sum(b.conj() @ W @ a for b, a in zip(fm.B, fm.A))


def truncated_gram(fm: FMRealization, N: int) -> np.ndarray:
    """Exact Gram matrix <b(L)e_u, b(L)e_v> for |u|, |v| <= N.

    No truncation error: the suffix structure of left multipliers makes
    the entries h^2 (diagonal), gamma(s) = phi A^{s'} B_t for u = s.v
    with s = s'.t, and 0 when neither word is a suffix of the other.
    """
    fmin = fm if fm.minimal else minimize(fm)
    if not fock_membership(fmin)["member"]:
        raise PreconditionError("truncated_gram needs a Fock-space member")
    basis = words(fmin.d, N)
    size = len(basis)
    if fmin.m == 0:
        return abs(fmin.D) ** 2 * np.eye(size, dtype=complex)
    W = observability_gramian(fmin)
    h2 = abs(fmin.D) ** 2 + np.real(sum(np.vdot(b, W @ b) for b in fmin.B))
    phi = _gamma_row(fmin, W)

    def gamma(s):
        return complex(phi @ word_eval(fmin.A, s[:-1]) @ fmin.B[s[-1] - 1])

    G = np.zeros((size, size), dtype=complex)
    for i, u in enumerate(basis):
        G[i, i] = h2
        for j, v in enumerate(basis):
            if len(u) > len(v) and u[len(u) - len(v) :] == v:
                g = gamma(u[: len(u) - len(v)])
                G[i, j] = g
                G[j, i] = np.conj(g)
    return G


def contractivity_probe(
    fm: FMRealization,
    samples: int = 20,
    prng_seed: int = 0,
    tol: float = DEFAULT_TOL,
    levels=(1, 2, 3),
) -> dict:
    """Empirical lower bound on the multiplier norm over strict row balls."""
    rng = np.random.default_rng(prng_seed)
    top = 0.0
    for _ in range(samples):
        n = int(rng.choice(levels))
        Z = random_row_contraction(fm.d, n, rng, row=float(rng.uniform(0.2, 0.98)))
        top = max(top, float(np.linalg.norm(transfer_eval(fm, Z), 2)))
    return {"max_norm": top, "exceeds_one": bool(top > 1.0 + tol)}
