"""Shift bundle witnesses and the windowed resolvent."""

from fractions import Fraction

import pytest

from drazin_lab.errors import PreconditionError, ResolventDomainError
from drazin_lab.exactnum import QComplex
from drazin_lab.operators import (DirectSum, Identity, Scaled, SumOp, ZeroOp,
                                  left_shift, right_shift, verify_on_basis)
from drazin_lab import witnesses as wit


BUNDLE = wit.one_sided_bundle()
W = 64  # window for most checks; the acceptance battery pushes to 128


def test_bundle_left_axioms_exact():
    rep = wit.window_axiom_report(BUNDLE.T, BUNDLE.S1, W, side="left")
    assert rep["max"] == 0.0
    assert rep["side"] == "left" and rep["window"] == W


def test_bundle_right_axioms_fail():
    # S1 is strictly one-sided: the right triple must break
    rep = wit.window_axiom_report(BUNDLE.T, BUNDLE.S1, 16, side="right")
    assert rep["max"] > 0.1


def test_bundle_idempotent_structure():
    b = BUNDLE
    P = SumOp((Identity(), Scaled(-1, b.S1 @ b.T)))
    assert verify_on_basis(P, b.P_structural, W) == 0.0
    assert verify_on_basis(b.T @ P, P @ b.T, W) == 0.0
    assert verify_on_basis(b.T @ P, b.TP_structural, W) == 0.0


def test_vanishing_row():
    rep = wit.vanishing_row_witness(BUNDLE.t_plus_p, row=1)
    assert rep["vanishes"] is True and rep["entries"] == ()
    # row 3 of T receives e_1 through the first block's shift
    rep2 = wit.vanishing_row_witness(BUNDLE.T, row=3)
    assert rep2["vanishes"] is False


def test_neumann_budget_holds_on_window():
    inv, budget = wit.neumann_inverse(BUNDLE.T2, terms=12)
    target = SumOp((Identity(), BUNDLE.T2))
    dev = verify_on_basis(inv @ target, Identity(), 48)
    assert dev <= float(budget)
    assert float(budget) < 1e-9  # ~ 2/13!


def test_quasipolar_roundtrip():
    rep = wit.quasipolar_left_witness(BUNDLE.T, BUNDLE.S1, W)
    for key, val in rep.items():
        if key.startswith("dev_"):
            assert val == 0.0, key


def test_commutant_invariance_and_refusal():
    b = BUNDLE
    for Wop in (Identity(), b.T, b.T @ b.T):
        rep = wit.commutant_invariance(b.T, b.S1, Wop, W)
        assert rep["dev_invariance"] <= 1e-12
    # S1 itself does not commute with T (S1 T = 1 (+) 0 but T S1 differs)
    with pytest.raises(PreconditionError):
        wit.commutant_invariance(b.T, b.S1, b.S1, 16)


def test_adjoint_duality_window():
    rep = wit.operator_adjoint_duality(BUNDLE.T, BUNDLE.S1, W)
    assert rep["max"] == 0.0


def test_uniqueness_of_verified_witnesses():
    q = BUNDLE.T2
    s40, _ = wit.neumann_inverse(q, terms=40)
    s48, _ = wit.neumann_inverse(q, terms=48)
    target = SumOp((Identity(), q))
    rep = wit.uniqueness_window(target, s40, s48, W)
    assert rep["deviation"] <= 1e-10


def test_derive_left_inverse_shapes():
    c, budget = wit.derive_left_inverse(Identity())
    assert verify_on_basis(c, Identity(), 8) == 0.0 and budget == 0
    c, budget = wit.derive_left_inverse(right_shift())
    assert verify_on_basis(c @ right_shift(), Identity(), 16) == 0.0
    with pytest.raises(PreconditionError):
        wit.derive_left_inverse(left_shift())  # kills e_1, not left invertible


def test_resolvent_on_pure_shift():
    # T1 is the unweighted right shift, left-inverted by the left shift;
    # at lambda = 1/4 the geometric leg converges with tail bound
    # 0.25^65 / 0.75
    out = wit.left_resolvent(wit.one_sided_bundle().T1, ZeroOp(),
                             Fraction(1, 4), K=64, n_cols=64)
    cap = float(Fraction(1, 4) ** 65 / Fraction(3, 4))
    assert out["window_residual"] <= out["remainder_bound"] <= cap * 1.0000001
    assert out["window_residual"] < cap


def test_resolvent_rejects_bad_points():
    T1 = BUNDLE.T1
    with pytest.raises(ResolventDomainError):
        wit.left_resolvent(T1, ZeroOp(), 0)
    with pytest.raises(ResolventDomainError):
        wit.left_resolvent(T1, ZeroOp(), Fraction(2))  # |lambda| ||c|| >= 1
    with pytest.raises(PreconditionError):
        # P must be idempotent and commute with T
        wit.left_resolvent(T1, right_shift(), Fraction(1, 4), n_cols=8)


def test_resolvent_ring_points_exact():
    pts = wit.resolvent_ring_points()
    assert len(pts) == 8
    for lam in pts:
        assert isinstance(lam, QComplex)
        assert lam.re * lam.re + lam.im * lam.im == Fraction(1, 25)


def test_resolvent_on_bundle_ring():
    b = BUNDLE
    inv12, budget = wit.neumann_inverse(b.T2, terms=12)
    c = DirectSum((left_shift(), inv12))
    for lam in wit.resolvent_ring_points():
        out = wit.left_resolvent(b.T, b.P_structural, lam, K=20, J=36,
                                 c=c, c_budget=budget,
                                 tp=b.TP_structural, n_cols=8)
        assert out["window_residual"] <= out["remainder_bound"]
