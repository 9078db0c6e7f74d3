"""Chain tables, the core/nil decomposition, and perturbation indices."""

import numpy as np
import pytest

from drazin_lab import chains
from drazin_lab.corpus import generate_corpus
from drazin_lab.drazin import drazin_index
from drazin_lab.errors import PreconditionError


def _j2():
    N = np.zeros((2, 2))
    N[0, 1] = 1.0
    return N


def test_chain_report_j2_oracle():
    rep = chains.chain_report(_j2())
    # frozen tables, k = 0..3
    assert rep.nullity == (0, 1, 2, 2)
    assert rep.rank == (2, 1, 0, 0)
    assert rep.meet == (1, 1, 0, 0)
    assert rep.join == (1, 1, 2, 2)
    assert rep.asc == rep.dsc == rep.dis == 2
    d = rep.as_dict()
    assert d["asc"] == 2 and d["nullity"] == [0, 1, 2, 2]


def test_chain_report_identity_and_block_example():
    rep = chains.chain_report(np.eye(3))
    assert rep.asc == rep.dsc == rep.dis == 0
    assert rep.nullity[0] == 0 and rep.rank[0] == 3

    # diag(1, 2, 0) (+) J2(0): one kernel line from the diagonal zero plus
    # a 2-chain, so ascent and descent stabilize at 2
    A = np.zeros((5, 5))
    A[0, 0], A[1, 1] = 1.0, 2.0
    A[3, 4] = 1.0
    rep = chains.chain_report(A)
    assert rep.asc == rep.dsc == 2
    assert rep.nullity[1] == 2 and rep.nullity[2] == 3
    assert rep.rank[1] == 3 and rep.rank[2] == 2


def test_chain_matches_engine_index_on_corpus():
    for gm in generate_corpus(13, 60):
        rep = chains.chain_report(gm.matrix)
        assert rep.asc == rep.dsc == rep.dis == gm.index
        assert rep.asc == drazin_index(gm.matrix)


def test_quasinilpotent_part_and_analytic_core():
    A = np.zeros((5, 5))
    A[0, 0], A[1, 1] = 1.0, 2.0
    A[3, 4] = 1.0
    h0 = chains.quasinilpotent_part(A)
    k = chains.analytic_core(A)
    assert h0.dim == 3 and k.dim == 2
    assert h0.contains([0.0, 0.0, 1.0, 0.0, 0.0])
    assert k.contains([1.0, 0.0, 0.0, 0.0, 0.0])


def test_kato_decomposition():
    A = np.diag([2.0, 0.0])
    core, nil, blocks, residuals = chains.kato_decomposition(A)
    assert core.dim == 1 and nil.dim == 1
    assert residuals["nil_order"] == 1
    core, nil, blocks, residuals = chains.kato_decomposition(_j2())
    assert core.dim == 0 and nil.dim == 2
    assert residuals["nil_order"] == 2
    assert residuals["invariance_core"] <= 1e-10
    assert residuals["invariance_nil"] <= 1e-10


def test_bf_index_zero_at_admissible_powers():
    A = _j2()
    for n in (2, 3):
        assert chains.bf_index(A, n) == 0
    with pytest.raises(PreconditionError) as exc:
        chains.bf_index(A, 1)  # below the stabilization degree
    assert "2" in str(exc.value)


def test_perturb_expand_zero_perturbation():
    A = np.array([[1.0, 2.0], [3.0, 4.0]])
    rep = chains.perturb_expand(A, np.zeros((2, 2)), 3)
    assert rep.expansion_residual == 0.0
    assert rep.essential_dim_gap == 0
    assert not rep.F1.any()
    d = rep.as_dict()
    assert "F1" not in d and d["n"] == 3


def test_perturb_expand_rank_one():
    rng = np.random.default_rng(7)
    T = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    u, v = rng.standard_normal(6), rng.standard_normal(6)
    F = 0.05 * np.outer(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    rep = chains.perturb_expand(T, F, 4)
    assert rep.expansion_residual <= 1e-12 * max(
        np.linalg.norm(T + F, 2), np.linalg.norm(T, 2)) ** 4
    assert rep.essential_dim_gap <= 4  # n * rank(F)


def test_perturb_expand_on_nilpotent_sample():
    # pure nilpotent: T^3 is exactly zero in exact arithmetic, so the rank
    # decisions must anchor to ||T||^3, not to the formed power's own noise
    gm = generate_corpus(1, 5)[2]
    assert gm.core_dim == 0 and gm.n == 7
    rng = np.random.default_rng(99)
    u = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    v = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    F = 0.3 * np.outer(u, v.conj()) / (np.linalg.norm(u) * np.linalg.norm(v))
    rep = chains.perturb_expand(gm.matrix, F, 3)
    assert rep.essential_dim_gap <= 3


def test_index_stability():
    J3 = np.zeros((3, 3))
    J3[0, 1] = J3[1, 2] = 1.0
    F = np.zeros((3, 3))
    F[0, 2] = 0.25  # feeds the existing chain, nilpotency order stays 3
    out = chains.index_stability(J3, F)
    # the gap index vanishes at the stabilization degree on both sides
    assert out["index_before"] == out["index_after"] == 0
    assert out["rank_f"] == 1
    assert out["chain_before"].asc == out["chain_after"].asc == 3
    with pytest.raises(PreconditionError):
        chains.index_stability(J3, np.eye(3))  # rank too large
    with pytest.raises(PreconditionError):
        chains.index_stability(J3, np.zeros((2, 2)))


def test_decomposition_index_equality():
    for M in (np.eye(3), _j2(), np.diag([3.0, 0.0])):
        out = chains.decomposition_index_equality(M)
        assert out["index"] == out["index_restricted"] == 0
