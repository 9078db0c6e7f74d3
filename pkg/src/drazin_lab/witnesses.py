"""Witness constructions for one-sided invertibility of banded operators.

Nothing here decides invertibility from band data; that is not sound.  The
module only verifies supplied witnesses: explicit left inverses from the
shift library, truncated Neumann series with certified tail budgets, and
the identities a claimed one-sided inverse must satisfy on a basis window.

Window checks run on full lazy columns, so a deviation of 0.0 means literal
coefficient equality on the tested basis vectors, not equality up to
truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import CheckFailure, PreconditionError, ResolventDomainError
from .exactnum import QComplex, abs2, one_over
from .operators import (
    BandedOp, ComposeOp, DirectSum, Identity, Scaled, Shift, SumOp, ZeroOp,
    WeightRule, basis_vector, left_shift, right_shift, verify_on_basis,
    qnil_certificate,
)

__all__ = [
    "window_axiom_report", "neumann_inverse", "derive_left_inverse",
    "ShiftBundle", "one_sided_bundle", "vanishing_row_witness",
    "quasipolar_left_witness", "commutant_invariance",
    "operator_adjoint_duality", "uniqueness_window", "left_resolvent",
    "resolvent_ring_points",
]

WINDOW = 128


# ---------------------------------------------------------------------------
# window axioms


def window_axiom_report(T: BandedOp, S: BandedOp, n_cols: int = WINDOW,
                        side: str = "left") -> dict:
    """Deviations of the two one-sided inverse identities on e_1..e_n_cols.

    left:   T S T = S T^2   and   S^2 T = S
    right:  T S T = T^2 S   and   T S^2 = S
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if side == "left":
        d1 = verify_on_basis(T @ S @ T, S @ T @ T, n_cols)
        d2 = verify_on_basis(S @ S @ T, S, n_cols)
    else:
        d1 = verify_on_basis(T @ S @ T, T @ T @ S, n_cols)
        d2 = verify_on_basis(T @ S @ S, S, n_cols)
    return {"side": side, "window": n_cols,
            "dev_weak_commute": d1, "dev_inner": d2, "max": max(d1, d2)}


def _require_axioms(T: BandedOp, S: BandedOp, n_cols: int, side: str,
                    tol: float = 1e-12):
    rep = window_axiom_report(T, S, n_cols, side)
    if rep["max"] > tol:
        raise PreconditionError(
            [f"{side} inverse axioms fail on the window: {rep}"])
    return rep


# ---------------------------------------------------------------------------
# Neumann series


def _tail_budget(op: BandedOp, first: int, probe: int = 12):
    """Upper bound on the norm-sum of op powers from first onward.

    Sums probe sampled bounds, then closes the tail geometrically once the
    sampled ratios have dropped to 1/2 or less.  Raises when they have not;
    a series this slow is not certified here.
    """
    vals = []
    for k in range(first, first + probe):
        v, _ = op.power_norm(k)
        vals.append(Fraction(v) if isinstance(v, (int, Fraction)) else float(v))
    last, prev = vals[-1], vals[-2]
    if float(prev) == 0.0:
        return sum(vals[:-1]) + last
    ratio = float(last) / float(prev)
    if ratio > 0.5:
        raise PreconditionError(
            [f"power norms decay too slowly (ratio {ratio:.3f}) to bound the tail"])
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total + 2 * last


def neumann_inverse(Q: BandedOp, terms: int = 40):
    """(series, budget): truncated inverse of I + Q and its error bound.

    series = sum of (-Q)^k for k = 0..terms.  budget bounds both
    ||series (I+Q) - I|| and ||(I+Q) series - I|| by the norm-sum of the
    dropped powers.
    """
    if terms < 1:
        raise ValueError("need at least one series term")
    parts: list = [Identity()]
    for k in range(1, terms + 1):
        term = ComposeOp((Q,) * k)
        parts.append(term if k % 2 == 0 else Scaled(-1, term))
    budget = _tail_budget(Q, terms + 1)
    return SumOp(tuple(parts)), budget


# ---------------------------------------------------------------------------
# the showcase bundle


@dataclass(frozen=True)
class ShiftBundle:
    """Direct sum of an unweighted and a reciprocal-weighted right shift.

    T has a left one-sided inverse witness S1 but no right one: the first
    coordinate of T x vanishes identically, so e_1 never lies in the range.
    P = I - S1 T is the associated idempotent, zero on the first block and
    the identity on the second, which makes T P quasi-nilpotent and T + P
    left invertible.
    """

    T: BandedOp
    S1: BandedOp
    P: BandedOp
    T1: BandedOp
    T2: BandedOp
    P_structural: BandedOp
    TP_structural: BandedOp
    t_plus_p: BandedOp
    t_plus_p_left_inverse: BandedOp
    neumann_budget: object


def one_sided_bundle(neumann_terms: int = 40) -> ShiftBundle:
    T1 = right_shift()
    T2 = right_shift(WeightRule.reciprocal())
    T = DirectSum((T1, T2))
    S1 = DirectSum((left_shift(), ZeroOp()))
    P = Identity() - (S1 @ T)
    series, budget = neumann_inverse(T2, neumann_terms)
    return ShiftBundle(
        T=T, S1=S1, P=P, T1=T1, T2=T2,
        P_structural=DirectSum((ZeroOp(), Identity())),
        TP_structural=DirectSum((ZeroOp(), T2)),
        t_plus_p=T + P,
        t_plus_p_left_inverse=DirectSum((left_shift(), series)),
        neumann_budget=budget,
    )


def vanishing_row_witness(op: BandedOp, row: int = 1) -> dict:
    """Exact functional certificate that basis row `row` of op is zero.

    A vanishing row means e_row is orthogonal to the range, so op cannot be
    surjective, hence not invertible.  Spectral estimates of truncations are
    deliberately not consulted.
    """
    entries = op.adjoint().column(row)
    return {"row": row, "vanishes": entries == (), "entries": entries}


# ---------------------------------------------------------------------------
# quasi-polar form and consequences


def quasipolar_left_witness(T: BandedOp, S: BandedOp,
                            n_cols: int = WINDOW) -> dict:
    """Round trip between a left inverse witness and its idempotent form.

    From a window-verified S build q = S T, check it is idempotent and
    commutes with T, then reconstruct b = q S q and check the chain
    b T = q, T b T = b T^2, b^2 T = b.  All six deviations reported.
    """
    _require_axioms(T, S, n_cols, "left")
    q = S @ T
    b = q @ S @ q
    report = {
        "dev_idempotent": verify_on_basis(q @ q, q, n_cols),
        "dev_commute": verify_on_basis(q @ T, T @ q, n_cols),
        "dev_bt_eq_q": verify_on_basis(b @ T, q, n_cols),
        "dev_weak_commute": verify_on_basis(T @ b @ T, b @ T @ T, n_cols),
        "dev_inner": verify_on_basis(b @ b @ T, b, n_cols),
        "dev_b_vs_s": verify_on_basis(b, S, n_cols),
    }
    report["max"] = max(report.values())
    report["q"] = q
    report["b"] = b
    return report


def commutant_invariance(T: BandedOp, S: BandedOp, W: BandedOp,
                         n_cols: int = WINDOW, side: str = "left",
                         tol: float = 1e-12) -> dict:
    """For W commuting with T, the idempotent P = I - S T absorbs W.

    left:  W P = P W P on the window.   right (P = I - T S):  P W = P W P.
    Commutation is a precondition and is itself checked on a window padded
    by the band of P, so the invariance identity never outruns the tested
    commutes.
    """
    P = Identity() - (S @ T if side == "left" else T @ S)
    pad = max(abs(P.band_lo), abs(P.band_hi))
    dev_c = verify_on_basis(W @ T, T @ W, n_cols + pad)
    if dev_c > tol:
        raise PreconditionError(
            [f"W does not commute with T on the padded window: {dev_c:.3e}"])
    if side == "left":
        dev = verify_on_basis(W @ P, P @ W @ P, n_cols)
    else:
        dev = verify_on_basis(P @ W, P @ W @ P, n_cols)
    return {"side": side, "window": n_cols, "dev_commute": dev_c,
            "dev_invariance": dev}


def operator_adjoint_duality(T: BandedOp, S: BandedOp,
                             n_cols: int = WINDOW) -> dict:
    """A left witness for T turns into a right witness for the adjoint.

    Checks T* S* T* = (T*)^2 S* and T* (S*)^2 = S* on the window after
    verifying the left axioms for (T, S).
    """
    left = window_axiom_report(T, S, n_cols, "left")
    right = window_axiom_report(T.adjoint(), S.adjoint(), n_cols, "right")
    return {"left": left, "right": right,
            "max": max(left["max"], right["max"])}


def uniqueness_window(T: BandedOp, S_left: BandedOp, S_right: BandedOp,
                      n_cols: int = WINDOW, tol: float = 1e-10) -> dict:
    """Window form of two-sided uniqueness.

    When one operator carries both a left and a right verified witness the
    two must agree; the deviation on the window is required below tol.
    """
    _require_axioms(T, S_left, n_cols, "left", tol=max(tol, 1e-12))
    _require_axioms(T, S_right, n_cols, "right", tol=max(tol, 1e-12))
    dev = verify_on_basis(S_left, S_right, n_cols)
    if dev > tol:
        raise CheckFailure(
            f"left and right witnesses disagree by {dev:.3e} on the window")
    return {"window": n_cols, "deviation": dev, "tol": tol}


# ---------------------------------------------------------------------------
# left resolvent


def derive_left_inverse(op: BandedOp, neumann_terms: int = 40):
    """(c, budget): a left inverse witness for structurally known shapes.

    Understood shapes: the identity, the unweighted right shift (inverted
    by the left shift), direct sums (inverted blockwise), and I + Q with Q
    certified quasi-nilpotent (truncated Neumann series).  budget bounds
    ||c op - I||; it is exactly 0 for the shift and identity cases.
    Anything else must bring its own witness.
    """
    while isinstance(op, SumOp) and len(op.terms) == 1:
        op = op.terms[0]
    if isinstance(op, Identity):
        return Identity(), Fraction(0)
    if isinstance(op, Shift) and op.direction == "right" \
            and op.rule.kind == "ones":
        return left_shift(), Fraction(0)
    if isinstance(op, DirectSum):
        parts = [derive_left_inverse(b, neumann_terms) for b in op.blocks]
        budget = max((p[1] for p in parts), key=float)
        return DirectSum(tuple(p[0] for p in parts)), budget
    if isinstance(op, SumOp) and len(op.terms) == 2:
        terms = op.terms
        for k in (0, 1):
            if isinstance(terms[k], Identity):
                Q = terms[1 - k]
                if qnil_certificate(Q)["verdict"]:
                    return neumann_inverse(Q, neumann_terms)
    raise PreconditionError(
        [f"no left inverse witness known for {type(op).__name__}"])


def resolvent_ring_points(scale: Fraction = Fraction(1, 5)) -> tuple:
    """Eight exact rational points with |lambda| = scale.

    Four axis points plus four from the 3-4-5 triangle, so the whole ring
    stays inside exact arithmetic.
    """
    s = Fraction(scale)
    a, b = s * Fraction(3, 5), s * Fraction(4, 5)
    pts = [QComplex(s, 0), QComplex(-s, 0), QComplex(0, s), QComplex(0, -s),
           QComplex(a, b), QComplex(a, -b), QComplex(-a, b), QComplex(-a, -b)]
    return tuple(pts)


def _abs_exact(lam):
    """|lam|, exact Fraction when |lam|^2 is a perfect rational square."""
    a2 = abs2(lam)
    if isinstance(a2, (int, Fraction)):
        a2 = Fraction(a2)
        rn, rd = math.isqrt(a2.numerator), math.isqrt(a2.denominator)
        if rn * rn == a2.numerator and rd * rd == a2.denominator:
            return Fraction(rn, rd)
    return math.sqrt(float(a2))


def _vec_axpy(acc: dict, s, vec: dict) -> dict:
    """acc + s * vec as a fresh dict, zero entries dropped."""
    out = dict(acc)
    for i, w in vec.items():
        nw = out.get(i, 0) + s * w
        if nw:
            out[i] = nw
        else:
            out.pop(i, None)
    return out


def _vec_l2(vec: dict) -> float:
    total = Fraction(0)
    for w in vec.values():
        total = total + abs2(w)
    return math.sqrt(float(total))


def left_resolvent(T: BandedOp, P: BandedOp, lam, K: int = 64, J: int = 40,
                   c: BandedOp | None = None, c_budget=None,
                   tp: BandedOp | None = None, n_cols: int = WINDOW,
                   pre_tol: float = 1e-12) -> dict:
    """Truncated two-term left inverse of (lam - T) near 0.

    Built from a left inverse c of T + P and the quasi-nilpotent product
    T P as

        L = [- sum_{k<=K} lam^k c^(k+1)] (I - P)
          + [sum_{j<=J} (T P)^j / lam^(j+1)] P

    valid on the punctured disk 0 < |lam| < 1 / ||c||.  With q = |lam| ||c||
    and E = ||c (T+P) - I|| the residual obeys

        || L (lam - T) x - x || <= [q^(K+1) + E] / (1 - q) ||(I-P) x||
                                   + || (T P / lam)^(J+1) || ||P x||

    and the construction is checked against that bound on x = e_1..e_n_cols
    before anything is returned.  Exact rational lam keeps the whole check
    in exact arithmetic, so bounds far below float epsilon are still
    decidable.

    P must be idempotent and commute with T; both are verified on a padded
    window.  tp is an optional structural stand-in for T P (say a direct
    sum with a known quasi-nilpotent block) whose power norms are sharper
    than the composed product's; it is window-checked against T P first.
    """
    if not lam:
        raise ResolventDomainError("lambda = 0 is excluded")
    if c is None:
        c, c_budget = derive_left_inverse(T + P)
    elif c_budget is None:
        c_budget = Fraction(0)
    pad = max(abs(P.band_lo), P.band_hi, abs(T.band_lo), T.band_hi)
    n_pre = n_cols + pad
    pre: list = []
    d = verify_on_basis(P @ P, P, n_pre)
    if d > pre_tol:
        pre.append(f"P is not idempotent on the window: {d:.3e}")
    d = verify_on_basis(T @ P, P @ T, n_pre)
    if d > pre_tol:
        pre.append(f"P does not commute with T on the window: {d:.3e}")
    ap = T @ P if tp is None else tp
    if tp is not None:
        d = verify_on_basis(T @ P, tp, n_pre)
        if d > pre_tol:
            pre.append(f"tp does not match T P on the window: {d:.3e}")
    d = verify_on_basis(c @ (T + P), Identity(), n_pre)
    if d > float(c_budget) + pre_tol:
        pre.append(f"c misses its left inverse budget: {d:.3e}")
    if pre:
        raise PreconditionError(pre)

    abs_lam = _abs_exact(lam)
    c_norm, _ = c.power_norm(1)
    q = float(abs_lam) * float(c_norm)
    if q >= 1.0:
        raise ResolventDomainError(
            f"|lambda| ||c|| = {q:.3f} is outside the series disk")
    inv_lam = one_over(lam)

    geo_tail = (q ** (K + 1) + float(c_budget)) / (1.0 - q)
    nil_tail = float(Scaled(inv_lam, ap).power_norm(J + 1)[0])
    p_norm = float(P.power_norm(1)[0])
    omp_norm = float((Identity() - P).power_norm(1)[0])
    bound = geo_tail * omp_norm + nil_tail * p_norm

    # residual column by column, series legs evaluated Horner style
    dev = 0.0
    for col in range(1, n_cols + 1):
        e = basis_vector(col)
        w = _vec_axpy({i: -v for i, v in T.apply(e).items()}, lam, e)
        w2 = P.apply(w)
        w1 = _vec_axpy(w, -1, w2)
        acc = dict(w1)
        for _ in range(K):
            acc = _vec_axpy(w1, lam, c.apply(acc))
        r = {i: -v for i, v in c.apply(acc).items()}
        acc = dict(w2)
        for _ in range(J):
            acc = _vec_axpy(w2, inv_lam, ap.apply(acc))
        r = _vec_axpy(r, inv_lam, acc)
        dev = max(dev, _vec_l2(_vec_axpy(r, -1, e)))
    if dev > bound:
        raise CheckFailure(
            f"resolvent residual {dev:.3e} exceeds its bound {bound:.3e}")

    parts = [Scaled(-1, c)]
    for k in range(1, K + 1):
        parts.append(Scaled(-(lam ** k), ComposeOp((c,) * (k + 1))))
    nil_parts = [Scaled(inv_lam, Identity())]
    for j in range(1, J + 1):
        nil_parts.append(Scaled(inv_lam ** (j + 1), ComposeOp((ap,) * j)))
    L = (SumOp(tuple(parts)) @ (Identity() - P)) + (SumOp(tuple(nil_parts)) @ P)
    return {"operator": L, "lambda": lam, "K": K, "J": J,
            "remainder_bound": bound, "window_residual": dev,
            "window": n_cols}
