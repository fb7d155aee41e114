"""Determinant-one certification for NC rational functions.

A function f with f(0) = 1 has det f(Z) identically one on all matrix
levels exactly when the per-level trace conditions

    sum_{j+k=l, j>=1} j * tr(f_j(Z) g_k(Z)) = 0   for all l >= 1

hold, where f_j are the homogeneous parts of f and g_k those of f^{-1}.
Without the normalization f(0) = 1 the trace conditions only certify
per-level constancy of the determinant, so the check here requires
|f(0) - 1| <= tol as well.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, HeuristicError, RegularityError
from .nc_expr import eval_expr
from .nc_linalg import MatrixTuple, Word, random_tuple, row_norm
from .realization import FMRealization, coefficients, fm_inv, transfer_eval


def homogeneous_parts(fm: FMRealization, L: int) -> list[dict[Word, complex]]:
    """Degree slices of the power series of fm, degrees 0..L."""
    coeffs = coefficients(fm, L)
    parts: list[dict[Word, complex]] = [dict() for _ in range(L + 1)]
    for w, c in coeffs.items():
        parts[len(w)][w] = c
    return parts


def _convolve(f_parts, g_parts, i: int, k: int, d: int) -> dict[Word, complex]:
    # degree-(i+k) part of (sum f_i) * (sum g_k), single (i, k) term
    out: dict[Word, complex] = {}
    for u, cu in f_parts[i].items():
        if cu == 0:
            continue
        for v, cv in g_parts[k].items():
            if cv == 0:
                continue
            out[u + v] = out.get(u + v, 0.0) + cu * cv
    return out


def inverse_parts(fm: FMRealization, L: int) -> list[dict[Word, complex]]:
    """Homogeneous parts of f^{-1}, degrees 0..L, cross-checked two ways.

    Route one goes through the realization of the inverse; route two is
    the convolution recursion g_0 = 1/D, g_l = -(1/D) sum f_i g_{l-i}.
    Disagreement beyond roundoff raises HeuristicError.
    """
    if abs(fm.D) < 1e-14:
        raise RegularityError("inverse_parts needs f(0) != 0")
    via_real = homogeneous_parts(fm_inv(fm), L)
    f_parts = homogeneous_parts(fm, L)
    g_parts: list[dict[Word, complex]] = [{(): 1.0 / fm.D}]
    for ell in range(1, L + 1):
        acc: dict[Word, complex] = {}
        for i in range(1, ell + 1):
            for w, c in _convolve(f_parts, g_parts, i, ell - i, fm.d).items():
                acc[w] = acc.get(w, 0.0) + c
        g_parts.append({w: -c / fm.D for w, c in acc.items()})
    scale = max(
        [abs(c) for part in g_parts for c in part.values()] + [1.0]
    )
    for ell in range(L + 1):
        keys = set(via_real[ell]) | set(g_parts[ell])
        for w in keys:
            diff = abs(via_real[ell].get(w, 0.0) - g_parts[ell].get(w, 0.0))
            if diff > 1e-8 * scale:
                raise HeuristicError(
                    f"inverse coefficient mismatch at {w}: {diff:.3g}"
                )
    return g_parts


def _word_values(Z: MatrixTuple, L: int) -> dict[Word, np.ndarray]:
    vals: dict[Word, np.ndarray] = {(): np.eye(Z.n, dtype=complex)}
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for j in range(1, Z.d + 1):
                vals[w + (j,)] = vals[w] @ Z[j - 1]
                nxt.append(w + (j,))
        frontier = nxt
    return vals


def _part_eval(part: dict[Word, complex], vals, n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=complex)
    for w, c in part.items():
        if c != 0:
            out += c * vals[w]
    return out


def sl_condition_check(
    fm: FMRealization, Z_samples, L: int, tol: float = 1e-9
) -> dict:
    """Trace conditions through level L at the given sample tuples.

    Returns the per-level worst residual, the overall max, and a holds
    flag that also insists on the normalization |f(0) - 1| <= tol.
    """
    f_parts = homogeneous_parts(fm, L)
    g_parts = inverse_parts(fm, L)
    per_level = [0.0] * (L + 1)
    for Z in Z_samples:
        vals = _word_values(Z, L)
        f_eval = [_part_eval(f_parts[j], vals, Z.n) for j in range(L + 1)]
        g_eval = [_part_eval(g_parts[k], vals, Z.n) for k in range(L + 1)]
        for ell in range(1, L + 1):
            R = 0.0 + 0.0j
            for j in range(1, ell + 1):
                R += j * np.trace(f_eval[j] @ g_eval[ell - j])
            per_level[ell] = max(per_level[ell], abs(complex(R)))
    max_residual = max(per_level[1:]) if L >= 1 else 0.0
    normalized = abs(fm.D - 1.0) <= tol
    return {
        "max_residual": float(max_residual),
        "per_level": [float(r) for r in per_level[1:]],
        "normalized": bool(normalized),
        "holds": bool(max_residual <= tol and normalized),
    }


def det_constancy_direct(f, Z_samples) -> dict:
    """max |det f(Z) - 1| over the samples, by direct evaluation.

    ``f`` may be an FMRealization or an expression AST.  Samples where
    the evaluation is singular are skipped and counted.
    """
    max_dev = 0.0
    skipped = 0
    used = 0
    for Z in Z_samples:
        try:
            if isinstance(f, FMRealization):
                val = transfer_eval(f, Z)
            else:
                val = eval_expr(f, Z)
        except (DomainError, RegularityError):
            skipped += 1
            continue
        max_dev = max(max_dev, abs(complex(np.linalg.det(val)) - 1.0))
        used += 1
    return {"max_abs_dev": float(max_dev), "n_samples": used, "skipped": skipped}


def sample_points(
    d: int,
    levels=(2, 3, 4),
    per_level: int = 20,
    radius: float = 0.5,
    prng_seed: int = 0,
) -> list[MatrixTuple]:
    """Random matrix tuples with prescribed row norms, one batch per level."""
    rng = np.random.default_rng(prng_seed)
    out = []
    for n in levels:
        for _ in range(per_level):
            Z = random_tuple(d, n, rng)
            nrm = row_norm(Z)
            out.append(MatrixTuple(tuple((radius / nrm) * z for z in Z)))
    return out
