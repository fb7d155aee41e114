"""Core linear algebra over matrix tuples.

Words, linear pencils, vectorization, completely positive maps, joint
spectral radii, contraction predicates, invariant subspaces and joint
equivalence tests.  Everything downstream is built on the conventions
fixed here:

* a word ``(i1, ..., ik)`` acts left-to-right, ``A^w = A_{i1} @ ... @ A_{ik}``;
* ``pencil(A, Z) = I - sum_j kron(A_j, Z_j)`` (state-space factor on the left);
* ``vec`` stacks columns, so ``kron(A, B) @ vec(Z) = vec(B @ Z @ A.T)``;
* inner products are linear in the second argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArityError,
    DomainError,
    HeuristicError,
    IterationError,
    PreconditionError,
)

DEFAULT_TOL = 1e-9
COND_THRESHOLD = 1e12
RANK_RTOL = 1e-10

Word = tuple  # tuple of int letters, 1-based


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """An ordered d-tuple of square complex matrices of a common size n.

    Parameters
    ----------
    matrices : sequence of (n, n) array_like
        The d entries.  They are copied, cast to complex and frozen.

    Notes
    -----
    ``n = 0`` is allowed (empty state space of a constant realization);
    ``d`` must be at least 1.
    """

    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.array(m, dtype=complex) for m in self.matrices)
        if not mats:
            raise ArityError("a MatrixTuple needs at least one entry")
        n = mats[0].shape[0] if mats[0].ndim == 2 else -1
        for m in mats:
            if m.ndim != 2 or m.shape != (n, n):
                raise ArityError("all entries must be square matrices of one size")
        for m in mats:
            m.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def d(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.matrices[k]

    def __repr__(self) -> str:  # pragma: no cover
        return f"MatrixTuple(d={self.d}, n={self.n})"


def zero_tuple(d: int, n: int) -> MatrixTuple:
    return MatrixTuple(tuple(np.zeros((n, n)) for _ in range(d)))


def transpose_tuple(A: MatrixTuple) -> MatrixTuple:
    """Entrywise transpose (no conjugation)."""
    return MatrixTuple(tuple(m.T for m in A))


def adjoint_tuple(A: MatrixTuple) -> MatrixTuple:
    """Entrywise conjugate transpose."""
    return MatrixTuple(tuple(m.conj().T for m in A))


def reverse(word: Word) -> Word:
    """Letter reversal w -> w^t."""
    return tuple(reversed(word))


def word_eval(A: MatrixTuple, word: Word) -> np.ndarray:
    """Evaluate A^w = A_{i1} @ ... @ A_{ik}; the empty word gives I_n."""
    out = np.eye(A.n, dtype=complex)
    for letter in word:
        if not 1 <= letter <= A.d:
            raise ArityError(f"letter {letter} outside 1..{A.d}")
        out = out @ A[letter - 1]
    return out


def pencil(A: MatrixTuple, Z: MatrixTuple, state_side: str = "left") -> np.ndarray:
    """Linear pencil ``I - sum_j kron(A_j, Z_j)`` of size (mn, mn).

    ``state_side="right"`` swaps the tensor factors; the determinant does
    not depend on the choice (the swap is a similarity).
    """
    if A.d != Z.d:
        raise ArityError(f"arity mismatch: {A.d} vs {Z.d}")
    mn = A.n * Z.n
    out = np.eye(mn, dtype=complex)
    for a, z in zip(A, Z):
        if state_side == "left":
            out -= np.kron(a, z)
        elif state_side == "right":
            out -= np.kron(z, a)
        else:
            raise ValueError("state_side must be 'left' or 'right'")
    return out


def solve_checked(M: np.ndarray, rhs: np.ndarray, what: str = "linear system") -> np.ndarray:
    """Dense solve with a condition estimate; DomainError when singular.

    The 1e12 condition threshold separates "outside the domain" from
    plain roundoff.
    """
    if M.shape[0] == 0:
        return rhs
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_THRESHOLD:
        raise DomainError(f"{what} is singular or ill-conditioned", cond=float(cond))
    return np.linalg.solve(M, rhs)


def pencil_solve(A: MatrixTuple, Z: MatrixTuple, rhs: np.ndarray) -> np.ndarray:
    """Solve ``pencil(A, Z) @ X = rhs``."""
    return solve_checked(pencil(A, Z), rhs, what="pencil")


def cp_apply(A: MatrixTuple, P: np.ndarray) -> np.ndarray:
    """One step of the completely positive map P -> sum_j A_j P A_j*."""
    P = np.asarray(P, dtype=complex)
    if P.shape != (A.n, A.n):
        raise ArityError(f"P must be {A.n}x{A.n}")
    out = np.zeros_like(P)
    for a in A:
        out += a @ P @ a.conj().T
    return out


def vec(M: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(M, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int, m: int | None = None) -> np.ndarray:
    if m is None:
        m = n
    return np.asarray(v, dtype=complex).reshape((n, m), order="F")


def matrize(pairs) -> np.ndarray:
    """Matrix of the map Z -> sum_j A_j Z B_j in vec coordinates.

    ``pairs`` is an iterable of (A_j, B_j); the result is
    ``sum_j kron(B_j.T, A_j)``.
    """
    pairs = list(pairs)
    n = pairs[0][0].shape[0]
    m = pairs[0][1].shape[0]
    out = np.zeros((n * m, n * m), dtype=complex)
    for a, b in pairs:
        out += np.kron(np.asarray(b, dtype=complex).T, np.asarray(a, dtype=complex))
    return out


def cp_matrization(A: MatrixTuple) -> np.ndarray:
    """Matrization of cp_apply(A, .): sum_j kron(conj(A_j), A_j)."""
    return matrize((a, a.conj().T) for a in A)


def joint_spectral_radius(A: MatrixTuple) -> float:
    """spr(A): square root of the spectral radius of the matrized CP map.

    Exact at machine precision, unlike the slowly converging Beurling
    iterate (kept separately in :func:`beurling_estimate` as a
    cross-check).
    """
    if A.n == 0:
        return 0.0
    eigs = np.linalg.eigvals(cp_matrization(A))
    return float(np.sqrt(np.max(np.abs(eigs))))


def beurling_estimate(A: MatrixTuple, k: int) -> float:
    """The Beurling iterate ``norm(cp_apply^k(I))**(1/(2k))``.

    The iterate is renormalized at each step and the log-magnitude
    accumulated, so spr**(2k) may under/overflow double precision
    without corrupting the result.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if A.n == 0:
        return 0.0
    P = np.eye(A.n, dtype=complex)
    logmag = 0.0
    for _ in range(k):
        P = cp_apply(A, P)
        nrm = float(np.linalg.norm(P, 2))
        if nrm == 0.0:
            return 0.0
        logmag += np.log(nrm)
        P = P / nrm
    return float(np.exp(logmag / (2 * k)))


def row_norm(A: MatrixTuple) -> float:
    """``norm(sum_j A_j A_j*)**0.5`` (the norm of A as a row operator)."""
    if A.n == 0:
        return 0.0
    return float(np.sqrt(np.linalg.norm(cp_apply(A, np.eye(A.n)), 2)))


def col_norm(A: MatrixTuple) -> float:
    """``norm(sum_j A_j* A_j)**0.5``."""
    return row_norm(adjoint_tuple(A))


def _row_defect(A: MatrixTuple) -> np.ndarray:
    """Hermitian defect I - sum_j A_j A_j*."""
    return np.eye(A.n) - cp_apply(A, np.eye(A.n))


def is_row_contraction(A: MatrixTuple, tol: float = DEFAULT_TOL) -> bool:
    if A.n == 0:
        return True
    return bool(np.min(np.linalg.eigvalsh(_row_defect(A))) >= -tol)


def is_row_coisometry(A: MatrixTuple, tol: float = DEFAULT_TOL) -> bool:
    if A.n == 0:
        return True
    return bool(np.max(np.abs(np.linalg.eigvalsh(_row_defect(A)))) <= tol)


def is_column_isometry(A: MatrixTuple, tol: float = DEFAULT_TOL) -> bool:
    return is_row_coisometry(adjoint_tuple(A), tol)


def is_pure(A: MatrixTuple, tol: float = DEFAULT_TOL) -> bool:
    """Pure if and only if spr(A) < 1."""
    return joint_spectral_radius(A) < 1.0 - tol


def similarity_to_strict_row_contraction(
    A: MatrixTuple, rho: float = 1.0, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """Invertible S with ``row_norm(S A S^{-1}) <= rho`` whenever spr(A) < rho.

    S = P^{-1/2} for the positive solution of the Stein equation
    P = I + rho^{-2} * sum_j A_j P A_j*, which exists exactly when
    spr(A) < rho; then sum_j (S A_j S^{-1})(S A_j S^{-1})* =
    P^{-1/2} (sum A_j P A_j*) P^{-1/2} <= rho^2 I.
    """
    spr = joint_spectral_radius(A)
    # strictness up to tol: at spr = rho - O(eps) the Stein solve is singular
    if spr >= rho * (1.0 - tol):
        raise PreconditionError(f"spr(A) = {spr:.6g} is not below rho = {rho:.6g}")
    n = A.n
    if n * n <= 4096:
        M = np.eye(n * n) - rho ** (-2.0) * cp_matrization(A)
        P = unvec(np.linalg.solve(M, vec(np.eye(n))), n)
    else:  # fixed-point fallback for large sizes
        P = np.eye(n, dtype=complex)
        for _ in range(20000):
            Pn = np.eye(n) + rho ** (-2.0) * cp_apply(A, P)
            if np.linalg.norm(Pn - P) <= tol * np.linalg.norm(Pn):
                P = Pn
                break
            P = Pn
        else:
            raise IterationError("Stein iteration for the Rota-Strang metric stalled")
    P = 0.5 * (P + P.conj().T)
    evals, V = np.linalg.eigh(P)
    if np.min(evals) <= 0:
        raise IterationError("Stein solution lost positivity")
    S = V @ np.diag(evals ** (-0.5)) @ V.conj().T
    return S


def conjugate_tuple(A: MatrixTuple, S: np.ndarray) -> MatrixTuple:
    """Blockwise similarity S A S^{-1}."""
    Sinv = np.linalg.inv(S)
    return MatrixTuple(tuple(S @ a @ Sinv for a in A))


def orth_columns(M: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the column space (SVD rank cut at rtol*smax)."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[1] == 0 or not np.any(M):
        return np.zeros((M.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > rtol * s[0]))
    return U[:, :r]


def nullspace(M: np.ndarray, rtol: float = RANK_RTOL, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the (right) nullspace.

    ``scale`` sets an absolute floor for the rank cutoff; without it a
    matrix of pure roundoff noise would count as full rank, since every
    singular value is comparable to the largest one.
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] == 0:
        return np.eye(M.shape[1], dtype=complex)
    U, s, Vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    cutoff = max(smax * max(M.shape) * 1e-12, (scale or 0.0) * rtol)
    r = int(np.sum(s > cutoff))
    return Vh[r:].conj().T


def krylov_span(A: MatrixTuple, seeds, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of span{A^w s : all words w, all seed vectors s}.

    The span is grown one letter at a time until the dimension stops
    increasing; it is the smallest A-invariant subspace containing the
    seeds.
    """
    cols = [np.asarray(s, dtype=complex).reshape(-1) for s in seeds]
    if not cols:
        return np.zeros((A.n, 0), dtype=complex)
    Q = orth_columns(np.column_stack(cols), rtol)
    while True:
        grown = [Q] + [a @ Q for a in A]
        Qn = orth_columns(np.column_stack(grown), rtol)
        if Qn.shape[1] == Q.shape[1]:
            return Qn
        Q = Qn


def is_irreducible(A: MatrixTuple, rtol: float = RANK_RTOL) -> bool:
    """True iff the unital algebra generated by the tuple is all of M_n.

    Burnside: the algebra is all of M_n exactly when there is no joint
    invariant subspace.  The algebra is spanned by words, grown by left
    multiplication from the identity until the span stabilizes.
    """
    n = A.n
    if n == 0:
        return False
    basis = orth_columns(vec(np.eye(n)).reshape(-1, 1), rtol)
    while True:
        mats = [unvec(basis[:, i], n) for i in range(basis.shape[1])]
        cand = [basis] + [vec(a @ m).reshape(-1, 1) for a in A for m in mats]
        nb = orth_columns(np.column_stack(cand), rtol)
        if nb.shape[1] == basis.shape[1]:
            return basis.shape[1] == n * n
        basis = nb


def largest_invariant_in(A: MatrixTuple, S0: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Largest subspace K of span(S0) with A_j K inside K for all j.

    Fixpoint K_{i+1} = K_i meet all A_j^{-1} K_i, realized by cutting the
    current basis down to the nullspace of the stacked invariance defects
    (I - K K*) A_j K.
    """
    K = orth_columns(np.asarray(S0, dtype=complex), rtol)
    op_scale = max([1.0] + [float(np.linalg.norm(a, 2)) for a in A])
    while K.shape[1] > 0:
        proj_out = np.eye(A.n) - K @ K.conj().T
        defect = np.vstack([proj_out @ a @ K for a in A])
        N = nullspace(defect, scale=op_scale)
        if N.shape[1] == K.shape[1]:
            return K
        K = orth_columns(K @ N, rtol)
    return K


def restrict_tuple(A: MatrixTuple, Q: np.ndarray) -> MatrixTuple:
    """Compression Q* A Q; a true restriction when span(Q) is invariant."""
    return MatrixTuple(tuple(Q.conj().T @ a @ Q for a in A))


def _invariance_defect(A: MatrixTuple, Q: np.ndarray) -> float:
    if Q.shape[1] == 0:
        return 0.0
    proj_out = np.eye(A.n) - Q @ Q.conj().T
    return max(float(np.linalg.norm(proj_out @ a @ Q, 2)) for a in A)


def _one_minimal_piece(A: MatrixTuple, rng: np.random.Generator, attempts: int = 40) -> np.ndarray:
    """A minimal A-invariant subspace of the full space (A acts on C^k, k>=1).

    Randomized cyclic shrinking: among the eigenvectors of a random
    linear combination, keep the one whose cyclic invariant subspace is
    smallest; restrict and repeat.  Minimality is certified by
    irreducibility of the restriction (Burnside).
    """
    k = A.n
    Q = np.eye(k, dtype=complex)
    for _ in range(attempts):
        B = restrict_tuple(A, Q)
        if B.n == 1 or is_irreducible(B):
            return Q
        coeff = rng.standard_normal(B.d) + 1j * rng.standard_normal(B.d)
        R = sum(c * b for c, b in zip(coeff, B))
        _, vects = np.linalg.eig(R)
        best = None
        for i in range(vects.shape[1]):
            W = krylov_span(B, [vects[:, i]])
            if best is None or W.shape[1] < best.shape[1]:
                best = W
            if W.shape[1] == 1:
                break
        if best.shape[1] == B.n:
            # no shrink this round; retry with a fresh combination
            continue
        Q = Q @ best
    B = restrict_tuple(A, Q)
    if B.n == 1 or is_irreducible(B):
        return Q
    raise HeuristicError("could not certify a minimal invariant subspace")


def minimal_invariant_decomposition(
    A: MatrixTuple, K: np.ndarray, prng_seed: int = 0, tol: float = DEFAULT_TOL
):
    """Maximal family of mutually orthogonal minimal A-invariant subspaces in K.

    Pieces are extracted greedily; after each one, the search continues in
    the largest invariant subspace of the orthogonal complement (inside K),
    so no further minimal invariant subspace is orthogonal to the family
    when the recursion stops.  The pieces need not span K.

    Every returned piece is re-verified: invariant within tol and with an
    irreducible (hence minimal) restriction.
    """
    rng = np.random.default_rng(prng_seed)
    K = orth_columns(np.asarray(K, dtype=complex))
    if _invariance_defect(A, K) > max(tol, 1e-8):
        raise PreconditionError("K is not invariant for A")
    pieces = []
    current = K
    while current.shape[1] > 0:
        sub = restrict_tuple(A, current)
        piece = current @ _one_minimal_piece(sub, rng)
        if _invariance_defect(A, piece) > 1e-7:
            raise HeuristicError("extracted piece failed the invariance check")
        pieces.append(piece)
        # orthogonal complement of the pieces found so far, inside K
        P = np.column_stack(pieces)
        comp = nullspace(P.conj().T @ K)
        current = largest_invariant_in(A, K @ comp) if comp.shape[1] else K @ comp
    return pieces


def joint_similarity(A: MatrixTuple, B: MatrixTuple, prng_seed: int = 0):
    """Invertible S with S A_j = B_j S for all j, or None.

    The solution space of the stacked Sylvester system is computed
    exactly; random combinations are probed for invertibility (a generic
    element of the space is invertible whenever any invertible solution
    exists).
    """
    if A.d != B.d or A.n != B.n:
        raise ArityError("joint_similarity needs matching shapes")
    n = A.n
    eye = np.eye(n)
    blocks = [np.kron(a.T, eye) - np.kron(eye, b) for a, b in zip(A, B)]
    N = nullspace(np.vstack(blocks))
    if N.shape[1] == 0:
        return None
    rng = np.random.default_rng(prng_seed)
    for _ in range(12):
        c = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
        S = unvec(N @ c, n)
        if np.linalg.cond(S) < 1e8:
            S = S / np.linalg.norm(S, 2)
            resid = max(np.linalg.norm(S @ a - b @ S, 2) for a, b in zip(A, B))
            if resid < 1e-7:
                return S
    return None


def random_tuple(d: int, n: int, rng: np.random.Generator) -> MatrixTuple:
    """Complex Gaussian tuple (unnormalized)."""
    return MatrixTuple(
        tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for _ in range(d))
    )


def random_row_contraction(
    d: int, n: int, rng: np.random.Generator, row: float = 0.9
) -> MatrixTuple:
    """Random tuple rescaled to the prescribed row norm (< 1: strict)."""
    A = random_tuple(d, n, rng)
    r = row_norm(A)
    scale = row / r if r > 0 else 0.0
    return MatrixTuple(tuple(scale * a for a in A))


def random_row_coisometry(d: int, n: int, rng: np.random.Generator) -> MatrixTuple:
    """Adjoint blocks of a Haar-ish (nd) x n isometry: sum T_j T_j* = I."""
    G = rng.standard_normal((n * d, n)) + 1j * rng.standard_normal((n * d, n))
    Q, _ = np.linalg.qr(G)
    return MatrixTuple(tuple(Q[k * n : (k + 1) * n, :].conj().T for k in range(d)))


def _star_words(length: int, d: int):
    # letters 1..d are A_j, letters d+1..2d are A_j*
    from itertools import product

    for w in product(range(1, 2 * d + 1), repeat=length):
        yield w


def _star_word_eval(A: MatrixTuple, w) -> np.ndarray:
    out = np.eye(A.n, dtype=complex)
    for letter in w:
        m = A[letter - 1] if letter <= A.d else A[letter - A.d - 1].conj().T
        out = out @ m
    return out


def joint_unitary_equivalence(
    A: MatrixTuple, B: MatrixTuple, prng_seed: int = 0, tol: float = 1e-8
):
    """Unitary U with U A_j U* = B_j for all j, or None.

    Decision in two stages: a *-word trace comparison (exhaustive through
    length min(6, 2n^2), randomized sampling beyond) rejects inequivalent
    tuples; a nonzero solution of the *-intertwiner system, pushed to its
    unitary polar factor and verified, is the definitive positive witness.
    """
    if A.d != B.d or A.n != B.n:
        raise ArityError("joint_unitary_equivalence needs matching shapes")
    n, d = A.n, A.d
    bound = 2 * n * n
    scale = max(1.0, row_norm(A), row_norm(B))
    for length in range(1, min(6, bound) + 1):
        for w in _star_words(length, d):
            ta = np.trace(_star_word_eval(A, w))
            tb = np.trace(_star_word_eval(B, w))
            if abs(ta - tb) > tol * max(1.0, scale**length) * n:
                return None
    rng = np.random.default_rng(prng_seed)
    for _ in range(200):
        length = int(rng.integers(7, bound + 1)) if bound >= 7 else 0
        if length == 0:
            break
        w = tuple(int(rng.integers(1, 2 * d + 1)) for _ in range(length))
        ta = np.trace(_star_word_eval(A, w))
        tb = np.trace(_star_word_eval(B, w))
        if abs(ta - tb) > tol * max(1.0, scale**length) * n:
            return None
    eye = np.eye(n)
    blocks = [np.kron(a.T, eye) - np.kron(eye, b) for a, b in zip(A, B)]
    blocks += [
        np.kron(a.conj(), eye) - np.kron(eye, b.conj().T) for a, b in zip(A, B)
    ]
    N = nullspace(np.vstack(blocks))
    if N.shape[1] == 0:
        return None
    for k in range(12):
        c = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
        X = unvec(N @ c, n)
        U0, _, V0h = np.linalg.svd(X)
        U = U0 @ V0h
        resid = max(np.linalg.norm(U @ a @ U.conj().T - b, 2) for a, b in zip(A, B))
        if resid < max(tol, 1e-8):
            return U
    return None
