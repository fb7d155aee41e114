"""Descriptor and Fornasini-Marchesini realizations of NC rational functions.

An FM realization (A, B, C, D) with state space C^m encodes

    r(Z) = D*I_n + (C (x) I_n) (I - sum_j A_j (x) Z_j)^{-1} (sum_j B_j (x) Z_j)

and carries the whole expression calculus: compilation from ASTs,
arithmetic, minimization, coefficient extraction, Fock-space membership
and the characteristic-polynomial identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import (
    DomainError,
    IterationError,
    PreconditionError,
    RegularityError,
)
from . import nc_expr
from .nc_linalg import (
    DEFAULT_TOL,
    MatrixTuple,
    adjoint_tuple,
    joint_spectral_radius,
    krylov_span,
    pencil,
    pencil_solve,
    restrict_tuple,
    row_norm,
    solve_checked,
    transpose_tuple,
    vec,
    unvec,
    zero_tuple,
)


@dataclass(frozen=True, eq=False)
class DescriptorRealization:
    """r(Z) = (b* (x) I) L_A(Z)^{-1} (c (x) I)."""

    A: MatrixTuple
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=complex).reshape(-1)
        c = np.array(self.c, dtype=complex).reshape(-1)
        if b.shape != (self.A.n,) or c.shape != (self.A.n,):
            raise PreconditionError("descriptor vectors must match the state size")
        b.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def m(self) -> int:
        return self.A.n


@dataclass(frozen=True, eq=False)
class FMRealization:
    """FM colligation (A, B, C, D); ``minimal`` is set by :func:`minimize`."""

    A: MatrixTuple
    B: tuple
    C: np.ndarray
    D: complex
    minimal: bool = field(default=False)

    def __post_init__(self):
        m = self.A.n
        B = tuple(np.array(b, dtype=complex).reshape(-1) for b in self.B)
        if len(B) != self.A.d or any(b.shape != (m,) for b in B):
            raise PreconditionError("B must hold d state-size vectors")
        C = np.array(self.C, dtype=complex).reshape(-1)
        if C.shape != (m,):
            raise PreconditionError("C must be a state-size row vector")
        for b in B:
            b.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", complex(self.D))

    @property
    def m(self) -> int:
        return self.A.n

    @property
    def d(self) -> int:
        return self.A.d

    def __repr__(self) -> str:  # pragma: no cover
        return f"FMRealization(d={self.d}, m={self.m}, minimal={self.minimal})"


def fm_const(value: complex, d: int) -> FMRealization:
    A = MatrixTuple(tuple(np.zeros((0, 0)) for _ in range(d)))
    return FMRealization(A, tuple(np.zeros(0) for _ in range(d)), np.zeros(0), value)


def fm_var(j: int, d: int) -> FMRealization:
    if not 1 <= j <= d:
        raise PreconditionError(f"variable index {j} outside 1..{d}")
    B = tuple(np.array([1.0 + 0j]) if k == j else np.array([0.0 + 0j]) for k in range(1, d + 1))
    return FMRealization(zero_tuple(d, 1), B, np.array([1.0 + 0j]), 0.0)


def transfer_eval(fm: FMRealization, Z: MatrixTuple) -> np.ndarray:
    """Evaluate the transfer function at Z."""
    n = Z.n
    if fm.m == 0:
        return fm.D * np.eye(n, dtype=complex)
    rhs = np.zeros((fm.m * n, n), dtype=complex)
    for b, z in zip(fm.B, Z):
        rhs += np.kron(b.reshape(-1, 1), z)
    X = pencil_solve(fm.A, Z, rhs)
    Crow = np.kron(fm.C.reshape(1, -1), np.eye(n))
    return fm.D * np.eye(n, dtype=complex) + Crow @ X


def descriptor_eval(desc: DescriptorRealization, Z: MatrixTuple) -> np.ndarray:
    n = Z.n
    if desc.m == 0:
        return np.zeros((n, n), dtype=complex)
    rhs = np.kron(desc.c.reshape(-1, 1), np.eye(n))
    X = pencil_solve(desc.A, Z, rhs)
    return np.kron(desc.b.conj().reshape(1, -1), np.eye(n)) @ X


def descriptor_from_fm(fm: FMRealization) -> DescriptorRealization:
    """Augment the state space by one dimension to absorb B and D."""
    m, d = fm.m, fm.d
    mats = []
    for k in range(d):
        M = np.zeros((m + 1, m + 1), dtype=complex)
        M[:m, :m] = fm.A[k]
        M[:m, m] = fm.B[k]
        mats.append(M)
    b = np.concatenate([fm.C.conj(), [np.conj(fm.D)]])
    c = np.zeros(m + 1, dtype=complex)
    c[m] = 1.0
    return DescriptorRealization(MatrixTuple(tuple(mats)), b, c)


def fm_from_descriptor(desc: DescriptorRealization) -> FMRealization:
    """Restrict to the orbit span of {A_k c} (the part B and A can reach)."""
    A, b, c = desc.A, desc.b, desc.c
    seeds = [a @ c for a in A]
    Q = krylov_span(A, seeds)
    A1 = restrict_tuple(A, Q)
    B1 = tuple(Q.conj().T @ s for s in seeds)
    C1 = (Q.conj().T @ b).conj()
    D = complex(np.vdot(b, c))
    return FMRealization(A1, B1, C1, D)


def _blkdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def fm_add(f: FMRealization, g: FMRealization) -> FMRealization:
    if f.d != g.d:
        raise PreconditionError("arity mismatch in fm_add")
    A = MatrixTuple(tuple(_blkdiag(af, ag) for af, ag in zip(f.A, g.A)))
    B = tuple(np.concatenate([bf, bg]) for bf, bg in zip(f.B, g.B))
    C = np.concatenate([f.C, g.C])
    return FMRealization(A, B, C, f.D + g.D)


def fm_scale(f: FMRealization, lam: complex) -> FMRealization:
    return FMRealization(f.A, f.B, lam * f.C, lam * f.D)


def fm_mul(f: FMRealization, g: FMRealization) -> FMRealization:
    """Cascade realization of the pointwise product."""
    if f.d != g.d:
        raise PreconditionError("arity mismatch in fm_mul")
    mf, mg = f.m, g.m
    mats, B = [], []
    for k in range(f.d):
        M = np.zeros((mf + mg, mf + mg), dtype=complex)
        M[:mf, :mf] = f.A[k]
        M[:mf, mf:] = np.outer(f.B[k], g.C)
        M[mf:, mf:] = g.A[k]
        mats.append(M)
        B.append(np.concatenate([f.B[k] * g.D, g.B[k]]))
    C = np.concatenate([f.C, f.D * g.C])
    return FMRealization(MatrixTuple(tuple(mats)), tuple(B), C, f.D * g.D)


def fm_inv(f: FMRealization) -> FMRealization:
    """State-space inverse; needs regularity at zero (D != 0)."""
    if abs(f.D) < 1e-14:
        raise RegularityError("fm_inv needs D != 0 (transfer singular at 0)")
    Dinv = 1.0 / f.D
    A = MatrixTuple(tuple(a - Dinv * np.outer(b, f.C) for a, b in zip(f.A, f.B)))
    B = tuple(Dinv * b for b in f.B)
    return FMRealization(A, B, -Dinv * f.C, Dinv)


def expr_to_fm(e, d: int | None = None) -> FMRealization:
    """Compile an AST to an (unminimized) FM realization.

    The compilation is the naive structural recursion; apply
    :func:`minimize` to remove the blowup.
    """
    if d is None:
        d = max(nc_expr.max_var_index(e), 1)

    def go(node):
        if isinstance(node, nc_expr.Const):
            return fm_const(node.value, d)
        if isinstance(node, nc_expr.Var):
            if node.index > d:
                raise PreconditionError(f"variable z{node.index} outside arity {d}")
            return fm_var(node.index, d)
        if isinstance(node, nc_expr.Add):
            return fm_add(go(node.left), go(node.right))
        if isinstance(node, nc_expr.Mul):
            return fm_mul(go(node.left), go(node.right))
        if isinstance(node, nc_expr.Neg):
            return fm_scale(go(node.arg), -1.0)
        if isinstance(node, nc_expr.Inv):
            try:
                return fm_inv(go(node.arg))
            except RegularityError:
                raise RegularityError(
                    f"not regular at zero: inv({nc_expr.to_str(node.arg)})"
                ) from None
        raise TypeError(f"not an AST node: {node!r}")

    return go(e)


def minimize(fm: FMRealization) -> FMRealization:
    """Controllable restriction followed by observable compression.

    Both spans are grown as Krylov subspaces with rank tolerance
    1e-10 * sigma_max; the result is flagged minimal.
    """
    def constant():
        base = fm_const(fm.D, fm.d)
        return FMRealization(base.A, base.B, base.C, base.D, minimal=True)

    # controllable part: smallest A-invariant subspace containing all B_k
    Vc = krylov_span(fm.A, list(fm.B))
    if Vc.shape[1] == 0:
        return constant()
    A1 = restrict_tuple(fm.A, Vc)
    B1 = tuple(Vc.conj().T @ b for b in fm.B)
    C1 = fm.C @ Vc
    # observable part: smallest A1*-invariant subspace containing C1*
    Vo = krylov_span(adjoint_tuple(A1), [C1.conj()])
    if Vo.shape[1] == 0:
        return constant()
    A2 = restrict_tuple(A1, Vo)
    B2 = tuple(Vo.conj().T @ b for b in B1)
    C2 = C1 @ Vo
    return FMRealization(A2, B2, C2, fm.D, minimal=True)


def words_of_length(d: int, k: int):
    return product(range(1, d + 1), repeat=k)


def coefficients(fm: FMRealization, maxdeg: int) -> dict:
    """All Taylor coefficients r^_w for |w| <= maxdeg.

    r^_empty = D and r^_{i1...ik} = C A^{i1...i(k-1)} B_{ik} under the
    fixed left-to-right word convention.
    """
    out = {(): complex(fm.D)}
    if maxdeg < 1:
        return out
    if fm.m == 0:
        for k in range(1, maxdeg + 1):
            for w in words_of_length(fm.d, k):
                out[w] = 0.0 + 0.0j
        return out
    rows = {(): fm.C.copy()}
    for k in range(1, maxdeg + 1):
        new_rows = {}
        for prefix, row in rows.items():
            for j in range(1, fm.d + 1):
                out[prefix + (j,)] = complex(row @ fm.B[j - 1])
                if k < maxdeg:
                    new_rows[prefix + (j,)] = row @ fm.A[j - 1]
        rows = new_rows
    return out


def coefficient_norms_sq(fm: FMRealization, maxdeg: int) -> list:
    """s_k = sum_{|w|=k} |r^_w|^2, computed without enumerating words."""
    out = [abs(fm.D) ** 2]
    if fm.m == 0:
        return out + [0.0] * maxdeg
    W = np.outer(fm.C.conj(), fm.C)
    for _ in range(maxdeg):
        out.append(float(np.real(sum(np.vdot(b, W @ b) for b in fm.B))))
        W = sum(a.conj().T @ W @ a for a in fm.A)
    return out


def fm_equal(f: FMRealization, g: FMRealization, tol: float = DEFAULT_TOL) -> bool:
    """Equality of transfer functions via the recognizable-series bound.

    After minimizing, two series of state dimensions mf, mg agree iff
    their coefficients agree through degree mf + mg.
    """
    fmin = f if f.minimal else minimize(f)
    gmin = g if g.minimal else minimize(g)
    if fmin.m != gmin.m:
        return False
    bound = fmin.m + gmin.m
    cf = coefficients(fmin, bound)
    cg = coefficients(gmin, bound)
    scale = max(1.0, max(abs(v) for v in cf.values()))
    return all(abs(cf[w] - cg[w]) <= tol * scale for w in cf)


def fock_membership(fm: FMRealization) -> dict:
    """Membership of the transfer function in the Fock space H^2_d.

    True exactly when the minimal state tuple has spr < 1; the radius
    1/spr bounds the row balls on which the series converges
    (None when spr = 0: entire).
    """
    fmin = fm if fm.minimal else minimize(fm)
    spr = joint_spectral_radius(fmin.A)
    member = bool(spr < 1.0)
    radius = float(1.0 / spr) if member and spr > 0 else None
    return {"member": member, "spr": float(spr), "radius": radius}


def char_poly_via_pencil(fm: FMRealization, Z: MatrixTuple, lam: complex) -> complex:
    """det((lam + r(0)) I_n - r(Z)) computed from two pencil determinants.

    Identity: lam^n det L_{A^(lam)}(Z) / det L_A(Z) with
    A^(lam)_k = A_k + lam^{-1} B_k C.  Holds for any realization of r,
    minimal or not.
    """
    if lam == 0:
        raise PreconditionError("lam must be nonzero")
    n = Z.n
    den = complex(np.linalg.det(pencil(fm.A, Z)))
    if abs(den) < 1e-250:
        raise DomainError("Z outside the domain: pencil determinant vanishes")
    Alam = MatrixTuple(tuple(a + np.outer(b, fm.C) / lam for a, b in zip(fm.A, fm.B)))
    num = complex(np.linalg.det(pencil(Alam, Z)))
    return lam**n * num / den


def transpose_realization(desc: DescriptorRealization) -> DescriptorRealization:
    """Descriptor of the letter-reversed series: (A^t, conj(c), conj(b))."""
    return DescriptorRealization(transpose_tuple(desc.A), desc.c.conj(), desc.b.conj())


def szego_kernel_apply(Z: MatrixTuple, W: MatrixTuple, P: np.ndarray) -> np.ndarray:
    """K = sum_w Z^w P (W^w)*, as the solution of K = P + sum_j Z_j K W_j*."""
    if not (row_norm(Z) < 1.0 - 1e-12 and row_norm(W) < 1.0 - 1e-12):
        raise PreconditionError("szego_kernel_apply needs strict row contractions")
    n = Z.n
    M = np.eye(n * n, dtype=complex)
    for zj, wj in zip(Z, W):
        M -= np.kron(wj.conj(), zj)
    return unvec(np.linalg.solve(M, vec(np.asarray(P, dtype=complex))), n)


def observability_gramian(fm: FMRealization, tol: float = DEFAULT_TOL) -> np.ndarray:
    """PSD solution of W = C*C + sum_k A_k* W A_k (needs spr(A) < 1)."""
    m = fm.m
    if m == 0:
        return np.zeros((0, 0), dtype=complex)
    spr = joint_spectral_radius(fm.A)
    if not spr < 1.0:
        raise PreconditionError(f"observability Gramian needs spr < 1, got {spr:.6g}")
    Q = np.outer(fm.C.conj(), fm.C)
    if m * m <= 4096:
        M = np.eye(m * m, dtype=complex)
        for a in fm.A:
            M -= np.kron(a.T, a.conj().T)
        Wg = unvec(np.linalg.solve(M, vec(Q)), m)
    else:
        Wg = Q.copy()
        for _ in range(200000):
            Wn = Q + sum(a.conj().T @ Wg @ a for a in fm.A)
            if np.linalg.norm(Wn - Wg) <= tol * max(1.0, np.linalg.norm(Wn)):
                Wg = Wn
                break
            Wg = Wn
        else:
            raise IterationError("Gramian fixed-point iteration stalled")
    return 0.5 * (Wg + Wg.conj().T)


def hardy_norm_sq(fm: FMRealization) -> float:
    """Squared H^2 norm |D|^2 + sum_j B_j* W B_j of a member series."""
    fmin = fm if fm.minimal else minimize(fm)
    if not fock_membership(fmin)["member"]:
        raise PreconditionError("hardy_norm_sq needs a Fock-space member")
    if fmin.m == 0:
        return float(abs(fmin.D) ** 2)
    Wg = observability_gramian(fmin)
    return float(abs(fmin.D) ** 2 + np.real(sum(np.vdot(b, Wg @ b) for b in fmin.B)))


def rescale(fm: FMRealization, r: float) -> FMRealization:
    """Precompose with Z -> r Z (so transfer_eval(out, Z) = transfer_eval(in, rZ))."""
    if not r > 0:
        raise PreconditionError("rescale needs r > 0")
    A = MatrixTuple(tuple(r * a for a in fm.A))
    return FMRealization(A, tuple(r * b for b in fm.B), fm.C, fm.D)
