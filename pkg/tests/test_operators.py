"""Banded operator algebra: exact columns, norms, certificates, serde."""

from fractions import Fraction
from math import factorial

import pytest

from drazin_lab import operators as ops
from drazin_lab.errors import BandwidthCapError
from drazin_lab.exactnum import QComplex
from drazin_lab.operators import (ComposeOp, DirectSum, Identity, Scaled,
                                  Shift, SumOp, WeightRule, ZeroOp,
                                  basis_vector, left_shift, op_from_spec,
                                  qnil_certificate, right_shift,
                                  verify_on_basis)


def test_shift_columns():
    R, L = right_shift(), left_shift()
    assert R.column(3) == ((4, Fraction(1)),)
    assert L.column(3) == ((2, Fraction(1)),)
    assert L.column(1) == ()  # e_1 is killed
    # adjoint of the unweighted right shift is the left shift
    assert verify_on_basis(R.adjoint(), L, 32) == 0.0
    assert verify_on_basis(L.adjoint(), R, 32) == 0.0


def test_weighted_shift_and_window_norms():
    T2 = right_shift(WeightRule.reciprocal())
    assert T2.column(3) == ((4, Fraction(1, 3)),)
    for n in (1, 2, 5, 9):
        v, tight = T2.power_norm(n)
        assert tight
        assert v == Fraction(1, factorial(n))
    # e_1 through n applications picks up exactly 1/n!
    vec = basis_vector(1)
    for _ in range(6):
        vec = T2.apply(vec)
    assert vec == {7: Fraction(1, 720)}


def test_listtail_rule_windows():
    rule = WeightRule.from_list([2, 3, Fraction(1, 2)], Fraction(1, 4))
    S = right_shift(rule)
    assert S.column(2) == ((3, Fraction(3)),)
    assert S.column(9) == ((10, Fraction(1, 4)),)
    # best window of length 2 from j=1 is w1 w2 = 6
    assert S.power_norm(2) == (Fraction(6), True)


def test_sum_and_compose_columns():
    R = right_shift()
    A = SumOp((Identity(), Scaled(-1, R)))  # 1 - R
    assert dict(A.column(2)) == {2: Fraction(1), 3: Fraction(-1)}
    C = ComposeOp((left_shift(), R))  # LR = 1
    assert verify_on_basis(C, Identity(), 48) == 0.0
    # RL kills e_1 and fixes the rest
    D = ComposeOp((R, left_shift()))
    assert D.column(1) == ()
    assert dict(D.column(5)) == {5: Fraction(1)}


def test_scaled_collapses_and_exact_norm():
    R = right_shift()
    S = Scaled(QComplex(0, Fraction(1, 2)), Scaled(2, R))
    assert isinstance(S.inner, Shift)  # nesting collapsed
    v, tight = S.power_norm(3)
    assert tight and v == Fraction(1)  # |i/2 * 2|^3 = 1


def test_compose_power_norm_groups_repeated_factors():
    T2 = right_shift(WeightRule.reciprocal())
    C = ComposeOp((T2, T2, T2))
    v, tight = C.power_norm(1)
    # a run of one factor is a power of it, norm 1/3!, not (1/1!)^3
    assert tight and v == Fraction(1, 6)
    v2, _ = C.power_norm(2)
    assert v2 == Fraction(1, factorial(6))
    # distinct neighbours fall back to submultiplicativity
    M = ComposeOp((T2, right_shift(), T2))
    v3, tight3 = M.power_norm(1)
    assert not tight3 and v3 == Fraction(1, 1) * Fraction(1) * Fraction(1)


def test_direct_sum_interleaves():
    D = DirectSum((right_shift(), ZeroOp()))
    # odd ambient indices carry block 0: its e_j -> e_(j+1) shows up as
    # ambient 2j-1 -> 2j+1
    assert D.column(1) == ((3, Fraction(1)),)
    assert D.column(2) == ()  # block 1 is zero
    assert D.column(5) == ((7, Fraction(1)),)


def test_operator_power_and_identity():
    R = right_shift()
    P = R.power(3)
    assert dict(P.column(1)) == {4: Fraction(1)}
    assert isinstance(R.power(0), Identity)
    with pytest.raises(ValueError):
        R.power(-1)


def test_band_cap_enforced():
    class Wide(ops.BandedOp):
        def __init__(self):
            self._set_band(0, ops.BAND_CAP + 1)

    with pytest.raises(BandwidthCapError):
        Wide()


def test_verify_on_basis_is_literal_zero_on_equality():
    T2 = right_shift(WeightRule.reciprocal())
    A = SumOp((Identity(), T2))
    B = SumOp((Identity(), T2))
    assert verify_on_basis(A, B, 64) == 0.0
    # and strictly positive on a real difference
    assert verify_on_basis(A, Identity(), 8) > 0.0


def test_qnil_certificate():
    T2 = right_shift(WeightRule.reciprocal())
    cert = qnil_certificate(T2, n_max=60)
    assert cert["verdict"] is True
    n, v, root = cert["samples"][-1]
    assert n == 60 and v == float(Fraction(1, factorial(60)))
    assert 0.04 < root < 0.05
    # the unweighted shift is an isometry: no decay, refused
    cert2 = qnil_certificate(right_shift(), n_max=20)
    assert cert2["verdict"] is False


def test_spec_round_trips():
    T2 = right_shift(WeightRule.reciprocal())
    cases = [
        ZeroOp(),
        Identity(),
        right_shift(),
        left_shift(),
        T2,
        right_shift(WeightRule.from_list([1, Fraction(1, 4)], Fraction(2, 7))),
        Scaled(QComplex(Fraction(1, 5), Fraction(2, 7)), T2),
        SumOp((Identity(), Scaled(-1, T2))),
        ComposeOp((left_shift(), T2)),
        DirectSum((left_shift(), ZeroOp())),
        T2.adjoint(),
    ]
    for op in cases:
        back = op_from_spec(op.to_spec())
        assert verify_on_basis(op, back, 32) == 0.0, op.to_spec()


def test_op_from_spec_rejects_unknown_kind():
    with pytest.raises((ValueError, KeyError)):
        op_from_spec({"kind": "mystery"})
