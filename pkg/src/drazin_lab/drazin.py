"""Drazin engine: index, inverse, one-sided axiom checkers, constructions.

Conventions used throughout.  For a square A with index j (the smallest k
with rank(A^k) = rank(A^(k+1))), a left Drazin inverse X satisfies

    A X A = X A^2,    X^2 A = X,    X A^(j+1) = A^j,

a right Drazin inverse Y satisfies the mirrored triple

    A Y A = A^2 Y,    A Y^2 = Y,    A^(j+1) Y = A^j,

and the two-sided Drazin inverse satisfies both.  Group inverses are the
index-one strengthening where the third relation becomes X A^2 = A (left)
or A^2 Y = A (right).

The inverse itself is computed from the core/nil splitting: C^n splits into
the invariant subspaces range(A^j) (where A is invertible) and null(A^j)
(where A is nilpotent of order j).  Both subspaces are obtained by a
staircase of rank-revealing SVDs - one well-conditioned decision per power -
rather than from singular values of an explicitly formed A^k, whose noise
floor grows like ||A||^k and swamps sigma_max(A^k) for badly scaled products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CheckFailure, PreconditionError, SpectralSplitError
from .linalg import EPS, as_matrix, default_tol

__all__ = [
    "AxiomResiduals", "DrazinResult", "drazin_index", "drazin_inverse",
    "drazin_pinv_oracle", "check_left_drazin", "check_right_drazin",
    "check_group", "residual_nilpotency", "spectral_idempotent_left",
    "inverse_from_idempotent", "merge_two_sided", "power_lift", "group_lift",
    "bc_witness", "matrix_equation_equivalence", "adjoint_duality",
    "spectra_scan", "nilpotency_order", "core_nil_split",
]

_TINY = 1e-300


def _square(M) -> np.ndarray:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got {A.shape}")
    return A


def _fnorm(M) -> float:
    return float(np.linalg.norm(M))


def _rel(num: float, scale: float) -> float:
    return num / max(scale, _TINY)


@dataclass(frozen=True)
class AxiomResiduals:
    """Scaled residual norms of one inverse-axiom triple."""

    r_weak_commute: float
    r_inner: float
    r_index: float

    @property
    def max(self) -> float:
        return max(self.r_weak_commute, self.r_inner, self.r_index)

    def passes(self, tol: float) -> bool:
        return self.max <= tol

    def as_dict(self) -> dict:
        return {
            "r_weak_commute": self.r_weak_commute,
            "r_inner": self.r_inner,
            "r_index": self.r_index,
        }


@dataclass(frozen=True)
class DrazinResult:
    inverse: np.ndarray
    index: int
    idempotent: np.ndarray
    residuals: AxiomResiduals


# ---------------------------------------------------------------------------
# index and splitting


def _chain_cut(A: np.ndarray, tol: float | None) -> float:
    """Absolute singular value threshold for rank decisions along a chain.

    Every staircase step multiplies by A once, so step matrices carry noise
    of order eps * ||A||_2 regardless of their own largest singular value.
    A cut relative to the step's own sigma_max cannot see that floor, and
    can never call a fully collapsed step rank zero.  Anchor to ||A||_2,
    with headroom for the basis error accumulated across steps; measured
    worst cases sit near 20 * n * eps while the smallest true singular
    values stay above 1e-4 * ||A||_2.
    """
    n = max(A.shape)
    rel = 64.0 * n * EPS if tol is None else float(tol)
    return rel * float(np.linalg.norm(A, 2))


def _staircase_ranges(A: np.ndarray, cut: float, k_max: int):
    """Bases Q_k of range(A^k) for k = 0..k_max via one SVD per step.

    range(A^(k+1)) = A * range(A^k), so each step orthonormalizes A @ Q_k.
    Rank decisions happen on matrices whose noise floor is eps * ||A||, never
    on explicitly formed powers.  cut is the absolute threshold from
    _chain_cut.
    """
    n = A.shape[0]
    bases = [np.eye(n, dtype=np.complex128)]
    for _ in range(k_max):
        Q = bases[-1]
        if Q.shape[1] == 0:
            bases.append(Q)
            continue
        u, s, _ = np.linalg.svd(A @ Q, full_matrices=False)
        r = int(np.sum(s > cut))
        bases.append(u[:, :r])
    return bases


def _staircase_nulls(A: np.ndarray, cut: float, k_max: int):
    """Bases N_k of null(A^k) for k = 0..k_max.

    null(A^(k+1)) = {v : A v in null(A^k)} = null((I - P_k) A) with P_k the
    orthogonal projector onto null(A^k).  cut as in _staircase_ranges.
    """
    n = A.shape[0]
    bases = [np.zeros((n, 0), dtype=np.complex128)]
    for _ in range(k_max):
        Nk = bases[-1]
        if Nk.shape[1] == n:
            bases.append(Nk)
            continue
        step = A - Nk @ (Nk.conj().T @ A)
        _, s, vh = np.linalg.svd(step)
        r = int(np.sum(s > cut))
        bases.append(vh[r:, :].conj().T)
    return bases


def drazin_index(A, tol: float | None = None) -> int:
    """Smallest k with rank(A^k) = rank(A^(k+1)).  0 iff A is invertible.

    tol is a relative cutoff measured against ||A||_2 and applied to every
    chain step (default 64 * n * eps).
    """
    A = _square(A)
    n = A.shape[0]
    bases = _staircase_ranges(A, _chain_cut(A, tol), n + 1)
    ranks = [b.shape[1] for b in bases]
    for k in range(1, n + 2):
        if ranks[k] == ranks[k - 1]:
            return k - 1
    raise RuntimeError("rank chain failed to stabilize")  # unreachable


def core_nil_split(A, tol: float | None = None):
    """(j, U_range, U_null): index plus orthonormal bases of range(A^j)
    and null(A^j).  The two subspaces are complementary and A-invariant.

    tol as in drazin_index."""
    A = _square(A)
    n = A.shape[0]
    cut = _chain_cut(A, tol)
    ranges = _staircase_ranges(A, cut, n + 1)
    ranks = [b.shape[1] for b in ranges]
    j = next(k - 1 for k in range(1, n + 2) if ranks[k] == ranks[k - 1])
    nulls = _staircase_nulls(A, cut, j)
    return j, ranges[j], nulls[j]


def _straddle_check(A: np.ndarray, nil_dim: int, gap_factor: float):
    """Raise when rank decisions split eigenvalues of comparable modulus."""
    n = A.shape[0]
    if nil_dim <= 0 or nil_dim >= n:
        return
    moduli = np.sort(np.abs(np.linalg.eigvals(A)))
    nil_edge = float(moduli[nil_dim - 1])
    core_edge = float(moduli[nil_dim])
    theta = n * EPS * float(moduli[-1])
    if core_edge < gap_factor * max(nil_edge, theta):
        raise SpectralSplitError(
            "core/nil eigenvalue separation too weak: |lambda| gap "
            f"{nil_edge:.3e} .. {core_edge:.3e} (nil dim {nil_dim}, "
            f"theta {theta:.3e})", nil_edge=nil_edge, core_edge=core_edge)


def drazin_inverse(A, tol: float | None = None, gap_factor: float = 50.0,
                   residual_cap: float = 1e-6) -> DrazinResult:
    """Two-sided Drazin inverse via the core/nil invariant splitting.

    Returns the inverse, the index j, the spectral idempotent P = I - X A,
    and the left-triple residuals.  Raises SpectralSplitError when the
    eigenvalue gap backing the split is weaker than gap_factor or when the
    verified residuals exceed residual_cap.
    """
    A = _square(A)
    n = A.shape[0]
    j, u_range, u_null = core_nil_split(A, tol)
    r = u_range.shape[1]

    if j == 0:
        X = np.linalg.solve(A, np.eye(n, dtype=np.complex128))
    elif r == 0:
        X = np.zeros_like(A)
    else:
        if u_null.shape[1] != n - r:
            raise SpectralSplitError(
                f"rank/nullity mismatch at index {j}: rank {r}, "
                f"nullity {u_null.shape[1]} in dimension {n}")
        _straddle_check(A, n - r, gap_factor)
        W = np.hstack([u_range, u_null])
        M = np.linalg.solve(W, A @ W)
        K = M[:r, :r]
        inner = np.zeros((n, n), dtype=np.complex128)
        inner[:r, :r] = np.linalg.solve(K, np.eye(r, dtype=np.complex128))
        X = W @ inner @ np.linalg.solve(W, np.eye(n, dtype=np.complex128))

    P = np.eye(n, dtype=np.complex128) - X @ A
    residuals = check_left_drazin(A, X, j)
    if not residuals.passes(residual_cap):
        raise SpectralSplitError(
            f"split produced residuals {residuals.as_dict()} above cap "
            f"{residual_cap:g}; the core/nil separation is unreliable")
    return DrazinResult(inverse=X, index=j, idempotent=P, residuals=residuals)


def drazin_pinv_oracle(A, k: int | None = None, tol: float | None = None) -> np.ndarray:
    """Independent construction X = A^k pinv(A^(2k+1)) A^k, k >= index.

    Kept free of the splitting machinery so it can cross-check it.  The
    pseudoinverse truncation must sit above the rounding noise of the formed
    power, accumulated from the spectral norms the multiplications actually
    passed through (an a-priori ||A||^(2k+1) bound is hopeless for
    non-normal A, where it can dwarf sigma_max of the result).
    """
    A = _square(A)
    n = A.shape[0]
    if k is None:
        k = drazin_index(A)
    if k < 0:
        raise ValueError("power k must be nonnegative")
    norm_a = float(np.linalg.norm(A, 2))
    P = np.eye(n, dtype=np.complex128)
    Ak = P
    noise_abs = 0.0
    for i in range(2 * k + 1):
        noise_abs += n * EPS * float(np.linalg.norm(P, 2)) * norm_a
        P = P @ A
        if i + 1 == k:
            Ak = P
    A2k1 = P
    smax = float(np.linalg.norm(A2k1, 2))
    if smax == 0.0:
        return np.zeros_like(A)
    rel = default_tol(A.shape) if tol is None else float(tol)
    rel = max(rel, noise_abs / smax)
    u, s, vh = np.linalg.svd(A2k1, full_matrices=False)
    keep = s > rel * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return Ak @ (vh.conj().T * inv) @ u.conj().T @ Ak


# ---------------------------------------------------------------------------
# axiom checkers


def _norm2(M) -> float:
    return float(np.linalg.norm(M, 2))


def check_left_drazin(A, X, j: int) -> AxiomResiduals:
    """Residuals of AXA = XA^2, X^2A = X, XA^(j+1) = A^j.

    Each residual is scaled by the spectral-norm size of the products being
    cancelled (backward-error convention), so identities between products
    that are themselves numerically zero, like both sides of the index
    relation for a nilpotent A, still verify cleanly.
    """
    A, X = _square(A), _square(X)
    if A.shape != X.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {X.shape}")
    if j < 0:
        raise ValueError("index must be nonnegative")
    na, nx = _norm2(A), _norm2(X)
    aj = np.linalg.matrix_power(A, j)
    r1 = _rel(_fnorm(A @ X @ A - X @ A @ A), na * na * nx)
    r2 = _rel(_fnorm(X @ X @ A - X), max(nx, nx * nx * na))
    r3 = _rel(_fnorm(X @ (A @ aj) - aj), max(nx * na ** (j + 1), na ** j))
    return AxiomResiduals(r1, r2, r3)


def check_right_drazin(A, Y, j: int) -> AxiomResiduals:
    """Residuals of AYA = A^2Y, AY^2 = Y, A^(j+1)Y = A^j, scaled as in
    check_left_drazin."""
    A, Y = _square(A), _square(Y)
    if A.shape != Y.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {Y.shape}")
    if j < 0:
        raise ValueError("index must be nonnegative")
    na, ny = _norm2(A), _norm2(Y)
    aj = np.linalg.matrix_power(A, j)
    r1 = _rel(_fnorm(A @ Y @ A - A @ A @ Y), na * na * ny)
    r2 = _rel(_fnorm(A @ Y @ Y - Y), max(ny, ny * ny * na))
    r3 = _rel(_fnorm((aj @ A) @ Y - aj), max(ny * na ** (j + 1), na ** j))
    return AxiomResiduals(r1, r2, r3)


def check_group(A, X, side: str = "left") -> AxiomResiduals:
    """Group-inverse residuals: the index relation strengthens to XA^2 = A
    (left) or A^2X = A (right)."""
    A, X = _square(A), _square(X)
    if A.shape != X.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {X.shape}")
    na, nx = _norm2(A), _norm2(X)
    if side == "left":
        r1 = _rel(_fnorm(A @ X @ A - X @ A @ A), na * na * nx)
        r2 = _rel(_fnorm(X @ X @ A - X), max(nx, nx * nx * na))
        r3 = _rel(_fnorm(X @ A @ A - A), max(nx * na * na, na))
    elif side == "right":
        r1 = _rel(_fnorm(A @ X @ A - A @ A @ X), na * na * nx)
        r2 = _rel(_fnorm(A @ X @ X - X), max(nx, nx * nx * na))
        r3 = _rel(_fnorm(A @ A @ X - A), max(nx * na * na, na))
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return AxiomResiduals(r1, r2, r3)


def residual_nilpotency(A, X, j: int) -> tuple[float, float]:
    """Residual checks on R = A - AXA: R^2 = A R, and R has order j.

    Returns (r_square, r_order), both scaled.  For j = 0 the order check
    degenerates to R itself being zero (power max(j, 1) avoids R^0 = I).
    """
    A, X = _square(A), _square(X)
    if A.shape != X.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {X.shape}")
    if j < 0:
        raise ValueError("index must be nonnegative")
    R = A - A @ X @ A
    n = A.shape[0]
    na, nx, nr = _norm2(A), _norm2(X), _norm2(R)
    # formation noise of A - AXA; at or below it R is numerically zero and
    # both relations hold vacuously
    floor = 8.0 * n * EPS * na * (1.0 + na * nx)
    if nr <= floor:
        return 0.0, 0.0
    r_square = _rel(_fnorm(R @ R - A @ R), max(nr * nr, na * nr))
    m = max(j, 1)
    Rj = np.linalg.matrix_power(R, m)
    r_order = _rel(_fnorm(Rj), max(nr, na) ** m)
    return r_square, r_order


def nilpotency_order(M, tol: float = 1e-10, cap: int | None = None,
                     scale: float | None = None) -> int:
    """Smallest m with ||M^m|| <= tol * scale^m, capped at rows.

    scale defaults to ||M||_2.  Pass the norm of the parent object when M
    is itself a computed product carrying rounding noise (say A @ P with P
    a projector): measured against its own norm, a numerically-zero M can
    never pass any relative test.  Raises PreconditionError when no power
    within the cap is negligible.
    """
    M = _square(M)
    n = M.shape[0]
    cap = n if cap is None else min(cap, n)
    nm = float(np.linalg.norm(M, 2))
    s = max(nm if scale is None else float(scale), EPS)
    if nm <= tol * s:
        return 1
    power = np.eye(n, dtype=np.complex128)
    for m in range(1, cap + 1):
        power = power @ M
        if _fnorm(power) <= tol * s ** m * np.sqrt(n):
            return m
    raise PreconditionError(
        f"matrix is not nilpotent within order {cap} at tolerance {tol:g}")


# ---------------------------------------------------------------------------
# constructions


def spectral_idempotent_left(A, X, tol: float = 1e-8) -> np.ndarray:
    """P = I - XA for a verified left Drazin inverse X.

    Verifies the left triple first (refusing with the residual report on
    failure), then checks P^2 = P, AP = PA, (AP)^j = 0 and that A + P is
    invertible before returning P.
    """
    A, X = _square(A), _square(X)
    j = drazin_index(A)
    res = check_left_drazin(A, X, j)
    if not res.passes(tol):
        raise PreconditionError(
            [f"X fails the left Drazin axioms at index {j}: {res.as_dict()}"])
    n = A.shape[0]
    P = np.eye(n, dtype=np.complex128) - X @ A
    failures = []
    np_scale = max(_fnorm(P), 1.0)
    if _rel(_fnorm(P @ P - P), np_scale) > tol:
        failures.append("P^2 = P fails")
    if _rel(_fnorm(A @ P - P @ A), max(_fnorm(A) * np_scale, 1.0)) > tol:
        failures.append("AP = PA fails")
    AP = A @ P
    if j > 0:
        order_resid = _fnorm(np.linalg.matrix_power(AP, j))
        if _rel(order_resid, max(_fnorm(AP), 1.0) ** j) > tol:
            failures.append(f"(AP)^{j} = 0 fails")
    if np.linalg.matrix_rank(A + P) < n:
        failures.append("A + P is singular")
    if failures:
        raise PreconditionError(failures)
    return P


def inverse_from_idempotent(A, P, side: str = "left", tol: float = 1e-8) -> np.ndarray:
    """Rebuild the Drazin inverse from a commuting nil idempotent.

    Preconditions (verified, all failures reported together): P^2 = P,
    AP = PA, AP nilpotent, A + P invertible.  Then

        left:   X = (A + P)^{-1} (I - P)
        right:  X = (I - P) (A + P)^{-1}

    and the result is checked against the corresponding axiom triple with
    j = order of AP.
    """
    A, P = _square(A), _square(P)
    if A.shape != P.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {P.shape}")
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    n = A.shape[0]
    failures = []
    np_scale = max(_fnorm(P), 1.0)
    if _rel(_fnorm(P @ P - P), np_scale) > tol:
        failures.append("P^2 = P fails")
    if _rel(_fnorm(A @ P - P @ A), max(_fnorm(A) * np_scale, 1.0)) > tol:
        failures.append("AP = PA fails")
    j = None
    try:
        AP = A @ P
        # AP inherits noise at the scale of A and P, not of itself
        ap_scale = max(_norm2(A), 1.0) * max(_norm2(P), 1.0)
        j = (nilpotency_order(AP, tol=max(tol, 1e-10), scale=ap_scale)
             if _fnorm(AP) > 0 else 1)
    except PreconditionError:
        failures.append("AP is not nilpotent")
    if np.linalg.matrix_rank(A + P) < n:
        failures.append("A + P is singular")
    if failures:
        raise PreconditionError(failures)
    if _fnorm(P) == 0.0:
        j = 0
    eye = np.eye(n, dtype=np.complex128)
    if side == "left":
        X = np.linalg.solve(A + P, eye - P)
        res = check_left_drazin(A, X, j)
    else:
        X = (eye - P) @ np.linalg.solve(A + P, eye)
        res = check_right_drazin(A, X, j)
    if not res.passes(max(tol, 1e-8)):
        raise CheckFailure(
            f"reconstructed inverse fails the {side} axioms: {res.as_dict()}")
    return X


def merge_two_sided(A, X, Y, j: int, tol: float = 1e-8) -> np.ndarray:
    """Combine a left inverse X and a right inverse Y into the common value.

    One-sided inverses of both kinds force X = Y; this verifies both triples
    and the closeness ||X - Y||, then returns the midpoint.
    """
    A, X, Y = _square(A), _square(X), _square(Y)
    left = check_left_drazin(A, X, j)
    right = check_right_drazin(A, Y, j)
    failures = []
    if not left.passes(tol):
        failures.append(f"X fails the left triple: {left.as_dict()}")
    if not right.passes(tol):
        failures.append(f"Y fails the right triple: {right.as_dict()}")
    if failures:
        raise PreconditionError(failures)
    gap = _rel(_fnorm(X - Y), max(_fnorm(X), _fnorm(Y)))
    if gap > tol:
        raise CheckFailure(
            f"one-sided inverses disagree: relative gap {gap:.3e}")
    return (X + Y) / 2.0


def _formed_power(A: np.ndarray, n: int):
    """A^n by explicit products, plus the rounding floor those products
    passed through.  ||A^n||_2 at or below the floor means the power is
    numerically zero; relations on it would compare noise to noise."""
    dim = A.shape[0]
    na = _norm2(A)
    P = np.eye(dim, dtype=np.complex128)
    floor = 0.0
    for _ in range(n):
        floor += dim * EPS * _norm2(P) * na
        P = P @ A
    return P, 8.0 * floor


def power_lift(X, A, n: int, j: int, tol: float = 1e-8) -> np.ndarray:
    """X^n as a left Drazin inverse of A^n (same index bound j).

    When n equals the index, A^n is additionally group invertible and the
    group triple is asserted as well.
    """
    if n < 1:
        raise ValueError("power n must be >= 1")
    A, X = _square(A), _square(X)
    base = check_left_drazin(A, X, j)
    if not base.passes(tol):
        raise PreconditionError(
            [f"X fails the left Drazin axioms: {base.as_dict()}"])
    Xn = np.linalg.matrix_power(X, n)
    An, zero_floor = _formed_power(A, n)
    if _norm2(An) <= zero_floor:
        # A^n vanished; the only one-sided inverse of 0 is 0
        if _fnorm(Xn) > tol * max(1.0, _norm2(X)) ** n:
            raise CheckFailure(f"A^{n} is numerically zero but X^{n} is not")
        return Xn
    lifted = check_left_drazin(An, Xn, j)
    if not lifted.passes(tol):
        raise CheckFailure(
            f"X^{n} fails the left triple for A^{n}: {lifted.as_dict()}")
    if n == j and j >= 1:
        grp = check_group(An, Xn, "left")
        if not grp.passes(tol):
            raise CheckFailure(
                f"X^{n} fails the group triple for A^{n}: {grp.as_dict()}")
    return Xn


def group_lift(A, X, n: int, tol: float = 1e-8) -> np.ndarray:
    """Z = X A^(n-1) from a left group inverse X of A^n.

    Requires the extra commutation hypothesis A X A = X A^2 in addition to
    the group axioms for A^n; then Z is a left Drazin inverse of A with
    index at most n.
    """
    if n < 1:
        raise ValueError("power n must be >= 1")
    A, X = _square(A), _square(X)
    failures = []
    An, zero_floor = _formed_power(A, n)
    if _norm2(An) <= zero_floor:
        # group inverse of a vanished power must itself vanish
        if _fnorm(X) > tol * max(1.0, _norm2(X)):
            failures.append(f"A^{n} is numerically zero but X is not")
    else:
        grp = check_group(An, X, "left")
        if not grp.passes(tol):
            failures.append(
                f"X fails the group triple for A^{n}: {grp.as_dict()}")
    extra = _rel(_fnorm(A @ X @ A - X @ A @ A),
                 _norm2(A) ** 2 * max(_norm2(X), _TINY))
    if extra > tol:
        failures.append(f"AXA = XA^2 fails: residual {extra:.3e}")
    if failures:
        raise PreconditionError(failures)
    Z = X @ np.linalg.matrix_power(A, n - 1)
    res = check_left_drazin(A, Z, n)
    if not res.passes(tol):
        raise CheckFailure(
            f"lifted candidate fails the left triple: {res.as_dict()}")
    return Z


def bc_witness(A, X, j: int) -> dict:
    """Residuals embedding X as the inverse along b = c = A^j:

    membership X = X^(j+1) A^j and the annihilation X A^(j+1) = A^j.
    """
    A, X = _square(A), _square(X)
    if j < 0:
        raise ValueError("index must be nonnegative")
    na, nx = _norm2(A), _norm2(X)
    aj = np.linalg.matrix_power(A, j)
    xj1 = np.linalg.matrix_power(X, j + 1)
    r_member = _rel(_fnorm(X - xj1 @ aj),
                    max(nx, nx ** (j + 1) * na ** j))
    r_annihil = _rel(_fnorm(X @ (A @ aj) - aj),
                     max(nx * na ** (j + 1), na ** j))
    return {"r_membership": r_member, "r_annihilation": r_annihil}


def matrix_equation_equivalence(A, tol: float | None = None) -> dict:
    """Solve the one-sided system and the commuting system independently.

    X1 comes from the idempotent construction (projector onto null(A^j)
    along range(A^j), then (A+P)^{-1}(I-P)); X2 is the engine's two-sided
    inverse.  The two solution sets coincide, so the outputs must agree.
    """
    A = _square(A)
    n = A.shape[0]
    j, u_range, u_null = core_nil_split(A, tol)
    if j == 0:
        P = np.zeros((n, n), dtype=np.complex128)
    elif u_range.shape[1] == 0:
        P = np.eye(n, dtype=np.complex128)
    else:
        W = np.hstack([u_range, u_null])
        D = np.zeros((n, n), dtype=np.complex128)
        m = u_null.shape[1]
        D[n - m:, n - m:] = np.eye(m)
        P = W @ D @ np.linalg.solve(W, np.eye(n, dtype=np.complex128))
    X1 = inverse_from_idempotent(A, P, "left")
    X2 = drazin_inverse(A, tol).inverse
    dev = _rel(_fnorm(X1 - X2), max(_fnorm(X1), _fnorm(X2)))
    return {"X1": X1, "X2": X2, "index": j, "deviation": dev}


def adjoint_duality(A, X, j: int) -> dict:
    """Left triple for (A, X) against the right triple for (A*, X*)."""
    A, X = _square(A), _square(X)
    left = check_left_drazin(A, X, j)
    right = check_right_drazin(A.conj().T, X.conj().T, j)
    return {"left": left, "right": right,
            "max": max(left.max, right.max)}


def spectra_scan(A, samples, tol: float | None = None,
                 residual_tol: float = 1e-8) -> list[dict]:
    """Drazin-invert lambda*I - A at every sample plus every eigenvalue.

    The Drazin spectrum of a matrix is empty: every shift admits a Drazin
    inverse.  Each record carries the index, the left residuals, and the
    right residuals of the adjoint pair; failures raise CheckFailure.

    Computed eigenvalues of a defective block scatter on a ring of radius
    about eps^(1/blocksize) around the true point; shifting at a raw ring
    point lands in the straddle zone.  Eigenvalue shifts are therefore
    polished to the mean of their cluster, widening the cluster radius on
    each straddle refusal until the split succeeds.  Shifts passed in
    samples are taken literally and refuse honestly.
    """
    A = _square(A)
    n = A.shape[0]
    eig = np.linalg.eigvals(A)
    scale = max(float(np.max(np.abs(eig))), 1.0)
    cl_tol = 8.0 * np.sqrt(EPS) * scale
    shifts = [(complex(s), False) for s in samples]
    used = np.zeros(eig.size, dtype=bool)
    for i in range(eig.size):
        if used[i]:
            continue
        cluster = np.abs(eig - eig[i]) <= cl_tol
        used |= cluster
        shifts.append((complex(np.mean(eig[cluster])), True))

    eye = np.eye(n, dtype=np.complex128)
    records = []
    for lam, polish in shifts:
        radius = cl_tol
        for attempt in range(8):
            try:
                result = drazin_inverse(lam * eye - A, tol)
                break
            except SpectralSplitError as err:
                if not polish or attempt == 7:
                    raise
                if err.core_edge:
                    # the ambiguous cluster ends at the core edge; net it all
                    radius = max(radius, 4.0 * err.core_edge)
                near = eig[np.abs(eig - lam) <= radius]
                if near.size == 0:
                    raise
                lam = complex(np.mean(near))
                radius *= 2.0
        B = lam * eye - A
        dual = adjoint_duality(B, result.inverse, result.index)
        worst = max(result.residuals.max, dual["max"])
        if worst > residual_tol:
            raise CheckFailure(
                f"shift {lam!r} failed: residual {worst:.3e}")
        records.append({
            "lambda": lam,
            "index": result.index,
            "left": result.residuals,
            "right": dual["right"],
        })
    return records
