"""Boundary spectra, Clark-family determinant identities, and the
Aronszajn-Donoghue machinery for finitely-correlated NC measures.

All decisions about mutual singularity happen at desk scale through the
co-isometric restriction pieces of the perturbed tuples T(zeta) and
joint unitary equivalence tests between them.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .errors import DomainError, HeuristicError, PreconditionError
from .clark import ClarkSeed, cayley, clark_family, minratreal_fm
from .fock import inner_certificate
from .nc_linalg import (
    DEFAULT_TOL,
    MatrixTuple,
    adjoint_tuple,
    is_irreducible,
    is_row_contraction,
    is_row_coisometry,
    joint_similarity,
    joint_unitary_equivalence,
    krylov_span,
    largest_invariant_in,
    minimal_invariant_decomposition,
    pencil,
    transpose_tuple,
)
from .realization import (
    FMRealization,
    fock_membership,
    szego_kernel_apply,
    transfer_eval,
)


def _scaled(A: MatrixTuple, r: float) -> MatrixTuple:
    return MatrixTuple(tuple(r * a for a in A))


def coisometric_restrictions(A: MatrixTuple, prng_seed: int = 0, tol: float = DEFAULT_TOL):
    """Maximal co-isometric structure of a row contraction.

    ktilde is the largest {A_k*}-invariant subspace of
    ker(I - sum A_j A_j*); the pieces are its minimal {A_k*}-invariant
    subspaces, each carrying the restricted tuple F = (A*|piece)*
    (a row co-isometry on the piece, verified).
    """
    if not is_row_contraction(A, tol=1e-8):
        raise PreconditionError("coisometric_restrictions needs a row contraction")
    m = A.n
    defect = np.eye(m) - sum(a @ a.conj().T for a in A)
    evals, V = np.linalg.eigh(defect)
    kerbasis = V[:, np.abs(evals) <= 1e-9]
    ktilde = largest_invariant_in(adjoint_tuple(A), kerbasis)
    pieces = []
    if ktilde.shape[1]:
        for Q in minimal_invariant_decomposition(adjoint_tuple(A), ktilde, prng_seed=prng_seed):
            F = MatrixTuple(tuple(Q.conj().T @ a @ Q for a in A))
            if not is_row_coisometry(F, tol=1e-7):
                raise HeuristicError("restricted piece is not co-isometric")
            pieces.append((Q, F))
    return {"ktilde": ktilde, "pieces": pieces}


def _eig_report(bval: np.ndarray, zeta: complex, tol: float) -> dict:
    eigs = np.linalg.eigvals(bval)
    dist = float(np.min(np.abs(eigs - zeta)))
    sv = np.linalg.svd(bval - zeta * np.eye(bval.shape[0]), compute_uv=False)
    gm = int(np.sum(sv <= max(tol, 1e-8) * max(1.0, sv[0] if sv.size else 1.0)))
    return {"eig_distance": dist, "geometric_multiplicity": gm}


def boundary_eigencheck(seed: ClarkSeed, zeta: complex, tol: float = DEFAULT_TOL) -> dict:
    """zeta as an eigenvalue of b(T(zeta)^t), per co-isometric piece.

    T(zeta) here is the perturbation attached to the Clark measure at
    zeta, which is the family member at parameter conj(zeta); with that
    bookkeeping zeta itself appears in the spectrum.  Evaluation
    failures (ill-conditioned pencils near the boundary) are reported
    with their condition estimates, not raised.
    """
    S = clark_family(seed, np.conj(zeta))
    Tz = adjoint_tuple(S)
    if not is_row_contraction(Tz, tol=1e-8):
        raise PreconditionError("T(zeta) is not a row contraction")
    fm = minratreal_fm(seed)

    def try_eval(tup: MatrixTuple) -> dict:
        P = pencil(fm.A, transpose_tuple(tup))
        entry: dict = {"cond": float(np.linalg.cond(P)) if P.size else 1.0}
        try:
            bval = transfer_eval(fm, transpose_tuple(tup))
        except DomainError as exc:
            entry.update({"ok": False, "error": str(exc)})
            return entry
        entry.update(_eig_report(bval, zeta, tol))
        entry["ok"] = entry["eig_distance"] <= 1e-8
        return entry

    rest = coisometric_restrictions(Tz)
    piece_reports = []
    for Q, F in rest["pieces"]:
        rep = try_eval(F)
        rep["dim"] = F.n
        piece_reports.append(rep)
    full = try_eval(Tz)
    n_pieces = len(piece_reports)
    gm_ok = full.get("geometric_multiplicity", 0) >= n_pieces if full.get("ok") else None
    return {
        "zeta": zeta,
        "n_pieces": n_pieces,
        "pieces": piece_reports,
        "full": full,
        "gm_at_least_pieces": gm_ok,
    }


def det_splitting(seed: ClarkSeed, zeta: complex, Z: MatrixTuple) -> dict:
    """The factorization det L_{T(lam)*}(Z) = det L_{T(0)*}(Z) det(I - conj(zeta) b(Z)).

    lam = conj(zeta) under this module's family convention.
    """
    lam = np.conj(zeta)
    lhs = complex(np.linalg.det(pencil(clark_family(seed, lam), Z)))
    base = complex(np.linalg.det(pencil(clark_family(seed, 0.0), Z)))
    bZ = cayley(seed, Z)
    rhs = base * complex(np.linalg.det(np.eye(Z.n) - np.conj(zeta) * bZ))
    scale = max(abs(lhs), abs(rhs), 1e-30)
    return {"lhs": lhs, "rhs": rhs, "rel_err": float(abs(lhs - rhs) / scale)}


def default_r_grid(kmax: int = 20):
    return [1.0 - 2.0 ** (-k) for k in range(1, kmax + 1)]


def boundary_limit(
    fm: FMRealization,
    A: MatrixTuple,
    y: np.ndarray,
    v: np.ndarray,
    r_grid=None,
    tol: float = 1e-6,
) -> dict:
    """Radial boundary data of b along a co-isometric tuple A.

    v must be a unit eigenvector of b^t(A) (checked; the eigenvalue zeta
    is read off by a Rayleigh quotient).  Reports the value sequence
    y* b(rA) v over the grid, and the kernel-norm bounds
    y* K(rA, rA)[vv* - b^t(rA) vv* b^t(rA)*] y.
    """
    if r_grid is None:
        r_grid = default_r_grid()
    if not fock_membership(fm)["member"]:
        raise PreconditionError("boundary_limit needs a Fock-space member")
    y = np.asarray(y, dtype=complex).reshape(-1)
    v = np.asarray(v, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    M1 = transfer_eval(fm, transpose_tuple(A)).T
    zeta = complex(np.vdot(v, M1 @ v))
    resid = float(np.linalg.norm(M1 @ v - zeta * v))
    if resid > max(tol, 1e-6):
        raise PreconditionError(f"v is not an eigenvector of b^t(A): residual {resid:.3g}")
    values, kernel_norms = [], []
    for r in r_grid:
        values.append(complex(np.vdot(y, transfer_eval(fm, _scaled(A, r)) @ v)))
        Mr = transfer_eval(fm, _scaled(transpose_tuple(A), r)).T
        vv = np.outer(v, v.conj())
        P = vv - Mr @ vv @ Mr.conj().T
        K = szego_kernel_apply(_scaled(A, r), _scaled(A, r), P)
        kernel_norms.append(float(np.real(np.vdot(y, K @ y))))
    gaps = [abs(a - b) for a, b in zip(values[1:], values[:-1])]
    return {
        "zeta": zeta,
        "eig_residual": resid,
        "r_grid": list(r_grid),
        "values": values,
        "kernel_norms_sq": kernel_norms,
        "last_gap": gaps[-1] if gaps else 0.0,
        "cauchy_converged": bool(gaps and gaps[-1] <= 1e-5 * max(1.0, abs(values[-1]))),
    }


def trace_perturbation_polys(A: MatrixTuple, x: np.ndarray, max_len: int) -> dict:
    """Exact polynomials p_w(z) = (tr A(z)^w - tr A^w)/z for |w| <= max_len.

    A_j(z) = A_j (I + z xx*); the expansion is carried out on matrix
    coefficient lists, so the output coefficients are exact up to
    roundoff.  Also reports the defects <A_j x, x> whose vanishing the
    degree-bound lemma requires.
    """
    if not is_irreducible(A):
        raise PreconditionError("trace_perturbation_polys needs an irreducible tuple")
    x = np.asarray(x, dtype=complex).reshape(-1)
    xx = np.outer(x, x.conj())
    m = A.n
    # degree-indexed matrix coefficients of each perturbed letter
    letters = [[a, a @ xx] for a in A]
    polys = {}
    for length in range(1, max_len + 1):
        for w in product(range(1, A.d + 1), repeat=length):
            coeffs = [np.eye(m, dtype=complex)]
            for letter in w:
                lo, hi = letters[letter - 1]
                new = [np.zeros((m, m), dtype=complex) for _ in range(len(coeffs) + 1)]
                for s, mat in enumerate(coeffs):
                    new[s] += mat @ lo
                    new[s + 1] += mat @ hi
                coeffs = new
            traces = [complex(np.trace(c)) for c in coeffs]
            # p_w drops the constant term and divides by z
            p = traces[1:]
            scale = max([abs(t) for t in traces] + [1.0])
            while p and abs(p[-1]) <= 1e-12 * scale:
                p.pop()
            polys[w] = p
    defects = [complex(np.vdot(a @ x, x)) for a in A]
    return {"polys": polys, "defects": defects}


def similarity_locus(
    A: MatrixTuple,
    x: np.ndarray,
    samples: int = 12,
    prng_seed: int = 0,
) -> dict:
    """Sampled size of {z on the circle : A(I + z xx*) jointly similar to A}.

    For n = 2 one nonzero similar point, or generally at least n^2/2 of
    them, triggers the all-points conclusion, which is then
    cross-validated at extra sample points.
    """
    x = np.asarray(x, dtype=complex).reshape(-1)
    if np.linalg.norm(x) == 0:
        raise PreconditionError("similarity_locus needs x != 0")
    if not is_irreducible(A):
        raise PreconditionError("similarity_locus needs an irreducible tuple")
    n = A.n
    xx = np.outer(x, x.conj())

    def perturbed(z):
        move = np.eye(n) + z * xx
        return MatrixTuple(tuple(a @ move for a in A))

    points = [np.exp(2j * np.pi * k / samples) for k in range(samples)]
    hits = [z for z in points if joint_similarity(perturbed(z), A, prng_seed=prng_seed) is not None]
    triggered = (n == 2 and len(hits) > 0) or len(hits) >= n * n / 2.0
    contradiction = False
    verdict = False
    if triggered:
        rng = np.random.default_rng(prng_seed)
        extra = [np.exp(2j * np.pi * (k + 0.5) / samples) for k in range(samples)]
        extra += [np.exp(2j * np.pi * rng.uniform()) for _ in range(4)]
        ok = [joint_similarity(perturbed(z), A, prng_seed=prng_seed) is not None for z in extra]
        verdict = all(ok)
        contradiction = not verdict
    return {
        "samples": samples,
        "hits": len(hits),
        "locus_size_estimate": len(hits) / samples,
        "corollary_triggered": bool(triggered),
        "all_similar_verdict": bool(verdict),
        "contradiction": bool(contradiction),
    }


def _pure_rank(A: MatrixTuple) -> int:
    defect = np.eye(A.n) - sum(a @ a.conj().T for a in A)
    return int(np.sum(np.abs(np.linalg.eigvalsh(defect)) > 1e-9))


def mutual_singularity(
    seed: ClarkSeed, zeta: complex, xi: complex, prng_seed: int = 0
) -> dict:
    """Mutual singularity of the Clark measures at zeta and xi.

    Verdict: NOT mutually singular exactly when some pair of minimal
    co-isometric pieces of T(zeta) and T(xi) is jointly unitarily
    equivalent.  As in boundary_eigencheck, the measure at zeta is the
    family member at parameter conj(zeta).
    """
    Tz = adjoint_tuple(clark_family(seed, np.conj(zeta)))
    Tx = adjoint_tuple(clark_family(seed, np.conj(xi)))
    rz = coisometric_restrictions(Tz, prng_seed=prng_seed)
    rx = coisometric_restrictions(Tx, prng_seed=prng_seed)
    pair = None
    for i, (_, F) in enumerate(rz["pieces"]):
        for j, (_, G) in enumerate(rx["pieces"]):
            if F.n != G.n:
                continue
            if joint_unitary_equivalence(F, G, prng_seed=prng_seed) is not None:
                pair = (i, j)
                break
        if pair:
            break
    return {
        "zeta": zeta,
        "xi": xi,
        "mutually_singular": pair is None,
        "equivalent_pair": pair,
        "n_pieces": (len(rz["pieces"]), len(rx["pieces"])),
        "pure_ranks": (_pure_rank(Tz), _pure_rank(Tx)),
    }


def _level1_nonzero(fm: FMRealization, prng_seed: int = 0) -> bool:
    rng = np.random.default_rng(prng_seed)
    for _ in range(5):
        z = rng.standard_normal(fm.d) + 1j * rng.standard_normal(fm.d)
        z = 0.6 * z / np.linalg.norm(z)
        Z = MatrixTuple(tuple(np.array([[zj]]) for zj in z))
        if abs(transfer_eval(fm, Z)[0, 0]) > 1e-10:
            return True
    return False


def ncAD_report(seed: ClarkSeed, points=None, prng_seed: int = 0) -> dict:
    """Aronszajn-Donoghue style report over a circle point set.

    With n the dimension of the backward orbit space of the seed, any
    n+1 distinct circle points must contain one whose Clark measure is
    singular to all the others; when b is inner, nonzero at level one,
    and some T(zeta) is irreducible, that zeta is singular to every
    other point.
    """
    n_dim = krylov_span(adjoint_tuple(seed.T), [seed.x]).shape[1]
    if points is None:
        count = n_dim + 1
        points = [np.exp(2j * np.pi * k / count) for k in range(count)]
    points = [complex(p) for p in points]
    npts = len(points)
    singular = np.zeros((npts, npts), dtype=bool)
    for i in range(npts):
        for j in range(i + 1, npts):
            verdict = mutual_singularity(seed, points[i], points[j], prng_seed=prng_seed)
            singular[i, j] = singular[j, i] = verdict["mutually_singular"]
    all_vs_rest = [bool(all(singular[i, j] for j in range(npts) if j != i)) for i in range(npts)]
    guarantee_holds = any(all_vs_rest)
    fm = minratreal_fm(seed)
    cert = inner_certificate(fm)
    level1 = _level1_nonzero(fm, prng_seed=prng_seed)
    irreducible_points = [
        i for i in range(npts) if is_irreducible(clark_family(seed, np.conj(points[i])))
    ]
    clause = {"applies": False, "holds": None, "point_index": None}
    if cert["inner"] and level1 and irreducible_points:
        i = irreducible_points[0]
        clause = {"applies": True, "holds": all_vs_rest[i], "point_index": i}
    return {
        "points": points,
        "orbit_dim": int(n_dim),
        "pairwise_singular": singular.tolist(),
        "singular_to_all_others": all_vs_rest,
        "guarantee_holds": bool(guarantee_holds),
        "inner": cert["inner"],
        "level1_nonzero": bool(level1),
        "irreducible_points": irreducible_points,
        "irreducible_point_clause": clause,
    }


def commutator_det(family, sample_lams=None) -> list:
    """det[T(lam)_1, T(lam)_2] as a polynomial in lam (ascending coefficients).

    ``family`` maps lam to a MatrixTuple; the first two components are
    used.  Entries of the family are affine in lam, so the determinant
    has degree at most 2n; it is recovered by interpolation at unit
    circle nodes.
    """
    probe = family(1.0)
    n = probe.n
    deg = 2 * n
    if sample_lams is None:
        sample_lams = [np.exp(2j * np.pi * k / (deg + 1)) for k in range(deg + 1)]
    if len(sample_lams) < deg + 1:
        raise PreconditionError("need at least 2n+1 interpolation nodes")
    lams = np.array([complex(l) for l in sample_lams])
    vals = []
    for lam in lams:
        S = family(lam)
        comm = S[0] @ S[1] - S[1] @ S[0]
        vals.append(complex(np.linalg.det(comm)))
    V = np.vander(lams, deg + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(V, np.array(vals), rcond=None)
    coeffs = list(coeffs)
    scale = max([abs(c) for c in coeffs] + [1.0])
    while coeffs and abs(coeffs[-1]) <= 1e-10 * scale:
        coeffs.pop()
    return [complex(c) for c in coeffs]
