"""Rank decisions, subspace arithmetic, and the matrix text format."""

import numpy as np
import pytest

from drazin_lab import linalg
from drazin_lab.linalg import (SubspaceBasis, intersect, null_basis, pinv,
                               range_basis, rank, subspace_sum)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        linalg.as_matrix(np.zeros(3))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_rank_basic():
    assert rank(np.eye(4)) == 4
    assert rank(np.zeros((3, 5))) == 0
    A = np.outer([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
    assert rank(A) == 1
    # explicit tolerance overrides: sigma = (1, 1e-5)
    D = np.diag([1.0, 1e-5])
    assert rank(D) == 2
    assert rank(D, tol=1e-4) == 1


def test_null_and_range_dimensions():
    A = np.array([[1.0, 0.0, 0.0],
                  [0.0, 0.0, 0.0],
                  [0.0, 0.0, 2.0]])
    nb = null_basis(A)
    rb = range_basis(A)
    assert nb.dim == 1 and rb.dim == 2
    assert nb.ambient_dim == rb.ambient_dim == 3
    # null vector really is killed
    assert np.linalg.norm(A @ nb.vectors) < 1e-14
    # rank-nullity
    assert rb.dim + nb.dim == 3


def test_subspace_basis_validation():
    with pytest.raises(ValueError):
        SubspaceBasis(3, np.ones((3, 2)))  # not orthonormal
    with pytest.raises(ValueError):
        SubspaceBasis(2, np.eye(3))  # too many columns / wrong ambient
    b = SubspaceBasis(3, np.eye(3)[:, :2])
    assert b.dim == 2
    P = b.projector()
    assert np.linalg.norm(P @ P - P) < 1e-14
    assert b.contains([1.0, 2.0, 0.0])
    assert not b.contains([0.0, 0.0, 1.0])
    assert b.contains([0.0, 0.0, 0.0])


def test_intersect_and_sum_dimension_identity():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((6, 5))
                        + 1j * rng.standard_normal((6, 5)))
    S1 = SubspaceBasis(6, q[:, :3])  # span(q0,q1,q2)
    S2 = SubspaceBasis(6, q[:, 2:5])  # span(q2,q3,q4)
    meet = intersect(S1, S2)
    join = subspace_sum(S1, S2)
    assert meet.dim == 1
    assert join.dim == 5
    assert meet.dim + join.dim == S1.dim + S2.dim
    assert meet.contains(q[:, 2])


def test_intersect_disjoint():
    S1 = SubspaceBasis(4, np.eye(4)[:, :2])
    S2 = SubspaceBasis(4, np.eye(4)[:, 2:])
    assert intersect(S1, S2).dim == 0
    assert subspace_sum(S1, S2).dim == 4


def test_pinv_matches_numpy_and_projects():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    X = pinv(A)
    assert np.allclose(X, np.linalg.pinv(A))
    assert np.linalg.norm(A @ X @ A - A) < 1e-12
    assert np.linalg.norm(X @ A @ X - X) < 1e-12
    # rank-deficient: pinv of zero is zero, transposed shape
    Z = pinv(np.zeros((2, 4)))
    assert Z.shape == (4, 2) and not Z.any()


def test_complex_token_round_trip():
    vals = [0.0, -0.0, 1.5, -2.25, 1e-308, np.pi, -1.0 / 3.0]
    for re in vals:
        for im in vals:
            z = complex(re, im)
            token = linalg.format_complex(z)
            back = linalg.parse_complex(token)
            # bit-exact round trip including signed zero of the imag part
            assert back == z or (back != back and z != z)
            assert np.signbit(back.imag) == np.signbit(z.imag)


def test_parse_complex_rejects_malformed():
    for bad in ["1.5", "1.5+2", "+2i", "1.5+2j", "", "1e3i"]:
        with pytest.raises(ValueError):
            linalg.parse_complex(bad)


def test_matrix_text_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((4, 6)) + 1j * rng.standard_normal((4, 6))
    path = tmp_path / "a.txt"
    linalg.save_matrix_text(path, A)
    B = linalg.load_matrix_text(path)
    assert B.shape == A.shape
    assert np.array_equal(A, B)
    # writing again produces identical bytes
    text1 = path.read_text()
    linalg.save_matrix_text(path, B)
    assert path.read_text() == text1


def test_parse_matrix_text_errors():
    with pytest.raises(ValueError):
        linalg.parse_matrix_text("2\n1.0+0i\n")
    with pytest.raises(ValueError):
        linalg.parse_matrix_text("1 2\n1.0+0i\n")  # wrong entry count
    with pytest.raises(ValueError):
        linalg.parse_matrix_text("0 2\n")
