"""Acceptance battery.

One test per acceptance criterion, each at its stated tolerance, so the
verbose test report carries one pass or fail line per criterion.  The
matrix criteria share one 500-sample seeded corpus; the operator criteria
drive the shift bundle at window 128.
"""

import json
import os
import subprocess
import sys
import time
from fractions import Fraction
from math import factorial

import numpy as np

from drazin_lab import chains, drazin
from drazin_lab import witnesses as wit
from drazin_lab.corpus import generate_corpus
from drazin_lab.operators import (ComposeOp, DirectSum, Identity, Scaled,
                                  SumOp, ZeroOp, basis_vector, left_shift,
                                  qnil_certificate, verify_on_basis)

CORPUS_SEED = 2026
CORPUS_SIZE = 500
_cache: dict = {}


def _pairs():
    if "pairs" not in _cache:
        _cache["pairs"] = [
            (gm, drazin.drazin_inverse(gm.matrix))
            for gm in generate_corpus(CORPUS_SEED, CORPUS_SIZE)
        ]
    return _cache["pairs"]


def _rel(num, den):
    return float(num) / max(float(den), 1e-300)


def test_criterion_01_axiom_suite_500_matrices_under_30s():
    t0 = time.monotonic()
    worst = 0.0
    for gm in generate_corpus(CORPUS_SEED, CORPUS_SIZE):
        assert gm.n <= 12 and gm.cond_s <= 100.0
        A = gm.matrix
        res = drazin.drazin_inverse(A)
        X, j = res.inverse, res.index
        na, nx = np.linalg.norm(A, 2), np.linalg.norm(X, 2)
        # the three two-sided relations
        r_comm = _rel(np.linalg.norm(A @ X - X @ A), na * nx)
        r_inner = _rel(np.linalg.norm(X @ A @ X - X), max(nx, nx * nx * na))
        r_index = res.residuals.r_index
        left = drazin.check_left_drazin(A, X, j).max
        right = drazin.check_right_drazin(A, X, j).max
        worst = max(worst, r_comm, r_inner, r_index, left, right)
    elapsed = time.monotonic() - t0
    assert worst <= 1e-8, f"worst axiom residual {worst:.3e}"
    assert elapsed <= 30.0, f"took {elapsed:.1f}s"


def test_criterion_02_pinv_oracle_equivalence():
    worst = 0.0
    for gm, res in _pairs():
        Y = drazin.drazin_pinv_oracle(gm.matrix, res.index)
        dev = _rel(np.linalg.norm(Y - res.inverse),
                   max(np.linalg.norm(res.inverse), 1.0))
        worst = max(worst, dev)
    assert worst <= 1e-8, f"worst oracle deviation {worst:.3e}"


def test_criterion_03_construction_round_trips():
    worst = 0.0
    for gm, res in _pairs():
        A, X, j, P = gm.matrix, res.inverse, res.index, res.idempotent
        nx = max(np.linalg.norm(X), 1.0)
        X_l = drazin.inverse_from_idempotent(A, P, "left")
        X_r = drazin.inverse_from_idempotent(A, P, "right")
        M = drazin.merge_two_sided(A, X_l, X_r, j, tol=1e-9)
        eq = drazin.matrix_equation_equivalence(A)
        worst = max(worst,
                    _rel(np.linalg.norm(X_l - X), nx),
                    _rel(np.linalg.norm(M - X), nx),
                    eq["deviation"])
    assert worst <= 1e-9, f"worst round-trip deviation {worst:.3e}"


def test_criterion_04_integer_laws_zero_violations():
    violations = 0
    for gm, _ in _pairs():
        A, n = gm.matrix, gm.n
        rep = chains.chain_report(A)  # raises on any cross-identity breach
        if not (rep.asc == rep.dsc == gm.index == rep.dis):
            violations += 1
        for m in range(rep.dis, n + 2):
            if chains._bf_from_report(rep, m) != 0:
                violations += 1
        h0 = chains.quasinilpotent_part(A)
        k = chains.analytic_core(A)
        if h0.dim + k.dim != n:
            violations += 1
    assert violations == 0, f"{violations} integer-law violations"


def test_criterion_05_bundle_identities_and_decay():
    b = wit.one_sided_bundle()
    N = 128
    rep = wit.window_axiom_report(b.T, b.S1, N)
    assert rep["max"] == 0.0  # t s1 t = s1 t^2 and s1^2 t = s1, exactly
    P = SumOp((Identity(), Scaled(-1, b.S1 @ b.T)))
    assert verify_on_basis(P, b.P_structural, N) == 0.0
    assert verify_on_basis(b.T @ P, P @ b.T, N) == 0.0
    assert verify_on_basis(b.T @ P, b.TP_structural, N) == 0.0

    # decay law of the weighted block: n applications scale e_1 by 1/n!
    vec = basis_vector(1)
    for n in range(1, 21):
        vec = b.T2.apply(vec)
        assert vec == {n + 1: Fraction(1, factorial(n))}
        v, tight = b.T2.power_norm(n)
        assert tight and v == Fraction(1, factorial(n))

    cert = qnil_certificate(b.T2, n_max=60)
    assert cert["verdict"] is True
    assert cert["samples"][-1][2] < 0.05

    row = wit.vanishing_row_witness(b.t_plus_p, row=1)
    assert row["vanishes"] is True and row["entries"] == ()


def test_criterion_06_resolvent_windows():
    b = wit.one_sided_bundle()
    out = wit.left_resolvent(b.T1, ZeroOp(), Fraction(1, 4), K=64, n_cols=64)
    cap = float(Fraction(1, 4) ** 65 / Fraction(3, 4))
    assert out["window_residual"] < cap

    inv12, budget = wit.neumann_inverse(b.T2, terms=12)
    c = DirectSum((left_shift(), inv12))
    pts = wit.resolvent_ring_points()
    assert len(pts) == 8
    for lam in pts:
        out = wit.left_resolvent(b.T, b.P_structural, lam, K=20, J=36,
                                 c=c, c_budget=budget,
                                 tp=b.TP_structural, n_cols=8)
        assert out["window_residual"] <= out["remainder_bound"]


def test_criterion_07_commutant_invariance():
    b = wit.one_sided_bundle()
    T = b.T
    poly = SumOp((Scaled(2, Identity()), Scaled(3, T),
                  ComposeOp((T, T, T))))
    for W in (Identity(), T, T @ T, poly):
        rep = wit.commutant_invariance(T, b.S1, W, 128)
        assert rep["dev_invariance"] <= 1e-12, type(W).__name__


def test_criterion_08_perturbation_battery_100_pairs():
    rng = np.random.default_rng(424242)
    count = 0
    for gm in generate_corpus(77, 100):
        T, n = gm.matrix, gm.n
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        F = 0.2 * np.outer(u, v.conj()) / (np.linalg.norm(u)
                                           * np.linalg.norm(v))
        rep = chains.perturb_expand(T, F, 3)  # raises on residual or rank
        scale = max(np.linalg.norm(T + F, 2), np.linalg.norm(T, 2)) ** 3
        assert rep.expansion_residual <= 1e-12 * scale
        assert rep.essential_dim_gap <= 3
        out = chains.index_stability(T, F)  # raises on inequality
        assert out["index_before"] == out["index_after"]
        count += 1
    assert count == 100


def test_criterion_09_adjoint_duality():
    worst = 0.0
    for gm, res in _pairs():
        out = drazin.adjoint_duality(gm.matrix, res.inverse, res.index)
        worst = max(worst, out["max"])
    assert worst <= 1e-10, f"worst duality residual {worst:.3e}"

    b = wit.one_sided_bundle()
    assert wit.operator_adjoint_duality(b.T, b.S1, 128)["max"] == 0.0


def test_criterion_10_cli_determinism_and_exit_codes(tmp_path):
    cli = [sys.executable, "-m", "drazin_lab.cli"]
    env = dict(os.environ)
    env.pop("DRAZIN_LAB_TOL", None)

    def run(*args, **kw):
        e = dict(env, **kw.pop("env_extra", {}))
        return subprocess.run(cli + list(args), capture_output=True,
                              text=True, env=e)

    texts = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        r = run("run", "--suite", "all", "--seed", "99", "--corpus", "3",
                "--window", "32", "--out", str(path))
        assert r.returncode == 0, r.stderr
        texts.append(path.read_text())

    def canon(text):
        d = json.loads(text)
        for rec in d["checks"]:
            rec.pop("elapsed_s", None)
        return json.dumps(d, sort_keys=True).encode()

    assert canon(texts[0]) == canon(texts[1])

    assert run("run", "--suite", "bogus").returncode == 2
    assert run("run", "--suite", "drazin", "--corpus", "2", "--window", "32",
               env_extra={"DRAZIN_LAB_TOL": "100"}).returncode == 1
    assert run("run", "--suite", "structure", "--corpus", "2",
               "--out", "/nonexistent-dir/x.json").returncode == 3
