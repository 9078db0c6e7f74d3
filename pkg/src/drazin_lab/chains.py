"""Kernel and range chain analysis for square matrices.

The chain tables are the integer backbone: dimensions of N(A^k) and R(A^k),
of N(A) inside R(A^k), and of R(A) + N(A^k), for k up to one past the
ambient dimension.  Everything else here (ascent, descent, stabilization
degree, the core/nil decomposition, perturbation indices) is read off those
tables, and the cross identities between them are checked as exact integer
equalities, never up to a tolerance.

Dimensions come from the same staircase rank decisions the inverse engine
uses, so no explicit matrix power is ever formed for a rank call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drazin import (_chain_cut, _staircase_nulls, _staircase_ranges,
                     drazin_index, nilpotency_order)
from .errors import CheckFailure, PreconditionError
from .linalg import SubspaceBasis, as_matrix, intersect, subspace_sum
from .linalg import rank as matrix_rank

__all__ = [
    "ChainReport", "PerturbReport", "chain_report", "quasinilpotent_part",
    "analytic_core", "kato_decomposition", "bf_index", "perturb_expand",
    "index_stability", "decomposition_index_equality",
]


def _square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise PreconditionError(
            [f"chain analysis needs a square matrix, got {A.shape}"])
    return A


def _rank_above(M, cut: float) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > cut))


def _norm2(M) -> float:
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True)
class ChainReport:
    """Dimension tables for k = 0..n+1 plus the degrees they determine.

    nullity[k] = dim N(A^k), rank[k] = dim R(A^k),
    meet[k] = dim(N(A) and R(A^k)), join[k] = dim(R(A) + N(A^k)).
    asc / dsc are the stabilization points of the first two tables, dis is
    the point past which meet stays constant.
    """

    n: int
    nullity: tuple
    rank: tuple
    meet: tuple
    join: tuple
    asc: int
    dsc: int
    dis: int

    def as_dict(self) -> dict:
        return {"n": self.n,
                "nullity": list(self.nullity), "rank": list(self.rank),
                "meet": list(self.meet), "join": list(self.join),
                "asc": self.asc, "dsc": self.dsc, "dis": self.dis}


def chain_report(A, tol: float | None = None) -> ChainReport:
    """Full chain tables with the cross identities verified.

    For every k the increments must match the mixed dimensions exactly:
    nullity[k+1] - nullity[k] = meet[k] and rank[k] - rank[k+1] =
    n - join[k].  Integer violations mean the rank decisions were
    inconsistent, and raise rather than degrade.
    """
    A = _square(A)
    n = A.shape[0]
    cut = _chain_cut(A, tol)
    k_max = n + 1
    ranges = _staircase_ranges(A, cut, k_max)
    nulls = _staircase_nulls(A, cut, k_max)
    rank_t = tuple(b.shape[1] for b in ranges)
    null_t = tuple(b.shape[1] for b in nulls)
    problems = []
    for k in range(k_max + 1):
        if rank_t[k] + null_t[k] != n:
            problems.append(f"rank {rank_t[k]} + nullity {null_t[k]} != {n} "
                            f"at k = {k}")
    if problems:
        raise CheckFailure("; ".join(problems))

    n1 = SubspaceBasis(n, nulls[1])
    r1 = SubspaceBasis(n, ranges[1])
    meet_t = tuple(intersect(n1, SubspaceBasis(n, ranges[k])).dim
                   for k in range(k_max + 1))
    join_t = tuple(subspace_sum(r1, SubspaceBasis(n, nulls[k])).dim
                   for k in range(k_max + 1))

    for k in range(k_max):
        if null_t[k + 1] - null_t[k] != meet_t[k]:
            problems.append(
                f"nullity step {null_t[k + 1] - null_t[k]} != meet {meet_t[k]} "
                f"at k = {k}")
        if rank_t[k] - rank_t[k + 1] != n - join_t[k]:
            problems.append(
                f"rank step {rank_t[k] - rank_t[k + 1]} != co-join "
                f"{n - join_t[k]} at k = {k}")
    if problems:
        raise CheckFailure("; ".join(problems))

    asc = next(k for k in range(k_max) if null_t[k] == null_t[k + 1])
    dsc = next(k for k in range(k_max) if rank_t[k] == rank_t[k + 1])
    dis = 0
    for k in range(k_max, 0, -1):
        if meet_t[k - 1] != meet_t[k_max]:
            dis = k
            break
    return ChainReport(n=n, nullity=null_t, rank=rank_t, meet=meet_t,
                       join=join_t, asc=asc, dsc=dsc, dis=dis)


def quasinilpotent_part(A, tol: float | None = None) -> SubspaceBasis:
    """N(A^d) at d = the stabilization index: the generalized null space.

    Invertible matrices give the zero subspace, nilpotent ones the whole
    space.
    """
    A = _square(A)
    d = drazin_index(A, tol)
    basis = _staircase_nulls(A, _chain_cut(A, tol), d)[d]
    return SubspaceBasis(A.shape[0], basis)


def analytic_core(A, tol: float | None = None) -> SubspaceBasis:
    """R(A^d) at the stabilization index: the largest subspace on which A
    acts invertibly.  The invertibility of the restriction is verified by
    a rank check before returning."""
    A = _square(A)
    d = drazin_index(A, tol)
    basis = _staircase_ranges(A, _chain_cut(A, tol), d)[d]
    core = SubspaceBasis(A.shape[0], basis)
    if core.dim:
        B = basis.conj().T @ A @ basis
        r = int(np.sum(np.linalg.svd(B, compute_uv=False)
                       > _chain_cut(A, tol)))
        if r != core.dim:
            raise CheckFailure(
                f"restriction to the core has rank {r} < {core.dim}")
    return core


@dataclass(frozen=True)
class KatoDecomposition:
    core: SubspaceBasis
    nil: SubspaceBasis
    blocks: dict
    residuals: dict

    def __iter__(self):
        return iter((self.core, self.nil, self.blocks, self.residuals))


def kato_decomposition(A, tol: float | None = None,
                       res_tol: float = 1e-10) -> KatoDecomposition:
    """Split the space into the core and nil invariant subspaces.

    core = R(A^j), nil = N(A^j), j the stabilization index.  Verified here:
    the two dimensions add to n with the joint basis of full rank, both
    subspaces are A-invariant within res_tol (relative to ||A||), the core
    block is invertible, and the nil block is nilpotent of order exactly j.
    blocks carries the two compressed matrices; residuals the numbers the
    assertions were judged on.
    """
    A = _square(A)
    n = A.shape[0]
    na = _norm2(A)
    j = drazin_index(A, tol)
    cut = _chain_cut(A, tol)
    core = SubspaceBasis(n, _staircase_ranges(A, cut, j)[j])
    nil = SubspaceBasis(n, _staircase_nulls(A, cut, j)[j])
    if core.dim + nil.dim != n:
        raise CheckFailure(
            f"core {core.dim} + nil {nil.dim} dimensions miss n = {n}")
    joint = np.hstack([core.vectors, nil.vectors])
    if matrix_rank(joint) != n:
        raise CheckFailure("core and nil bases are jointly rank deficient")

    def inv_residual(basis: SubspaceBasis) -> float:
        if basis.dim == 0:
            return 0.0
        img = A @ basis.vectors
        out = img - basis.vectors @ (basis.vectors.conj().T @ img)
        return float(np.linalg.norm(out)) / max(na, 1e-300)

    r_core = inv_residual(core)
    r_nil = inv_residual(nil)
    if max(r_core, r_nil) > res_tol:
        raise CheckFailure(
            f"invariance residuals {r_core:.3e}, {r_nil:.3e} exceed "
            f"{res_tol:.1e}; the split is too ill conditioned to certify")

    b_core = core.vectors.conj().T @ A @ core.vectors
    b_nil = nil.vectors.conj().T @ A @ nil.vectors
    core_rank = int(np.sum(np.linalg.svd(b_core, compute_uv=False) > cut)) \
        if core.dim else 0
    if core_rank != core.dim:
        raise CheckFailure(
            f"core block rank {core_rank} < {core.dim}: not invertible")
    order = nilpotency_order(b_nil, scale=max(na, 1.0)) if nil.dim else 0
    expect = j if nil.dim else 0
    if order != expect:
        raise CheckFailure(
            f"nil block order {order} differs from the index {expect}")

    residuals = {
        "invariance_core": r_core, "invariance_nil": r_nil,
        "joint_min_sigma": float(np.linalg.svd(joint, compute_uv=False)[-1])
        if n else 0.0,
        "core_rank": core_rank, "nil_order": order, "index": j,
        # rank-nullity bookkeeping: both chain spaces are complemented,
        # and the core maps onto itself
        "complement_ok": core.dim + nil.dim == n,
        "core_onto": core_rank == core.dim,
    }
    return KatoDecomposition(core=core, nil=nil,
                             blocks={"core": b_core, "nil": b_nil},
                             residuals=residuals)


def _bf_from_report(rep: ChainReport, n: int) -> int:
    if n < rep.dis:
        raise PreconditionError(
            [f"power {n} is below the stabilization degree dis = {rep.dis}"])
    k = min(n, len(rep.meet) - 1)
    ind = rep.meet[k] - (rep.n - rep.join[k])
    if ind != 0:
        raise CheckFailure(
            f"chain index {ind} != 0 breaks rank-nullity conservation")
    return ind


def bf_index(A, n: int, tol: float | None = None) -> int:
    """meet[n] - (dim - join[n]): always 0 for matrices, and asserted so.

    The tables must have stabilized: n below dis(A) is a precondition
    failure that names the required degree.
    """
    return _bf_from_report(chain_report(A, tol), n)


@dataclass(frozen=True)
class PerturbReport:
    n: int
    F1: np.ndarray
    expansion_residual: float
    index_before: int
    index_after: int
    essential_dim_gap: int

    def as_dict(self) -> dict:
        return {"n": self.n,
                "expansion_residual": self.expansion_residual,
                "index_before": self.index_before,
                "index_after": self.index_after,
                "essential_dim_gap": self.essential_dim_gap}


def perturb_expand(T, F, n: int) -> PerturbReport:
    """Expand (T+F)^n as T^n plus the mixed-term correction F1.

    F1 = sum over i < n of T^i F (T+F)^(n-1-i).  The expansion is exact
    algebra, so the residual against the directly formed power must sit at
    rounding level, 1e-12 relative to the n-th power of the larger norm.
    rank(F1) <= n rank(F) and the power rank gap obeys the same budget;
    both are asserted, making the correction finite-rank in a quantified
    way.
    """
    T, F = _square(T), _square(F)
    if T.shape != F.shape:
        raise PreconditionError(
            [f"shape mismatch: {T.shape} vs {F.shape}"])
    if n < 1:
        raise PreconditionError([f"need a power n >= 1, got {n}"])
    TF = T + F
    dim = T.shape[0]
    eye = np.eye(dim, dtype=np.complex128)

    tf_pows = [eye]
    t_pows = [eye]
    for _ in range(n):
        tf_pows.append(tf_pows[-1] @ TF)
        t_pows.append(t_pows[-1] @ T)
    F1 = np.zeros_like(T)
    for i in range(n):
        F1 = F1 + t_pows[i] @ F @ tf_pows[n - 1 - i]

    scale = max(_norm2(TF), _norm2(T), 1e-300) ** n
    residual = float(np.linalg.norm(tf_pows[n] - t_pows[n] - F1))
    if residual > 1e-12 * scale:
        raise CheckFailure(
            f"expansion residual {residual:.3e} exceeds 1e-12 * {scale:.3e}")

    # ranks of the formed powers decide against an absolute cut anchored
    # to the pre-power norms; the power's own largest singular value is the
    # wrong yardstick once a nilpotent part has collapsed it
    eps = float(np.finfo(np.float64).eps)
    base = max(_norm2(TF), _norm2(T), 1e-300)
    rank_f = matrix_rank(F)
    f1_cut = 64.0 * dim * eps * n * base ** (n - 1) * max(_norm2(F), 1e-300)
    rank_f1 = _rank_above(F1, f1_cut)
    if rank_f1 > n * rank_f:
        raise CheckFailure(
            f"rank(F1) = {rank_f1} exceeds n rank(F) = {n * rank_f}")
    pow_cut = 64.0 * dim * eps * base ** n
    gap = abs(_rank_above(tf_pows[n], pow_cut)
              - _rank_above(t_pows[n], pow_cut))
    if gap > n * rank_f:
        raise CheckFailure(
            f"power rank gap {gap} exceeds n rank(F) = {n * rank_f}")

    rep_t = chain_report(T)
    rep_tf = chain_report(TF)
    return PerturbReport(
        n=n, F1=F1, expansion_residual=residual,
        index_before=_bf_from_report(rep_t, rep_t.dis),
        index_after=_bf_from_report(rep_tf, rep_tf.dis),
        essential_dim_gap=gap)


def index_stability(T, F, tol: float | None = None) -> dict:
    """Chain index of T against T + F for a low-rank F.

    rank(F) <= n/2 is required so the perturbation stays small against the
    ambient space.  Both indices are computed at their own stabilization
    degrees and must agree (both are 0 for matrices); the full tables of
    both matrices ride along for inspection.
    """
    T, F = _square(T), _square(F)
    if T.shape != F.shape:
        raise PreconditionError(
            [f"shape mismatch: {T.shape} vs {F.shape}"])
    rank_f = matrix_rank(F)
    if rank_f > T.shape[0] / 2:
        raise PreconditionError(
            [f"rank(F) = {rank_f} exceeds half the dimension {T.shape[0]}"])
    rep_t = chain_report(T, tol)
    rep_tf = chain_report(T + F, tol)
    i_before = _bf_from_report(rep_t, rep_t.dis)
    i_after = _bf_from_report(rep_tf, rep_tf.dis)
    if i_before != i_after:
        raise CheckFailure(
            f"index changed under perturbation: {i_before} -> {i_after}")
    return {"index_before": i_before, "index_after": i_after,
            "rank_f": rank_f, "chain_before": rep_t, "chain_after": rep_tf}


def decomposition_index_equality(A, tol: float | None = None) -> dict:
    """Index of A against the plain Fredholm index of its core block.

    The core block is square and invertible, so dim N - codim R of the
    restriction is 0 by two separately computed ranks; the chain index of
    the whole matrix must match.  An empty core contributes 0 by
    convention.
    """
    A = _square(A)
    rep = chain_report(A, tol)
    ind_full = _bf_from_report(rep, rep.dis)
    kd = kato_decomposition(A, tol)
    d = kd.core.dim
    if d:
        r = kd.residuals["core_rank"]
        ind_core = (d - r) - (d - r)
    else:
        ind_core = 0
    if ind_full != ind_core:
        raise CheckFailure(
            f"chain index {ind_full} != restricted index {ind_core}")
    return {"index": ind_full, "index_restricted": ind_core,
            "core_dim": d, "nil_dim": kd.nil.dim,
            "chain": rep}
