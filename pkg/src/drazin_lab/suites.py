"""Scenario suites: deterministic check batteries with reportable records.

Each check runs over the configured corpus or the operator bundle, keeps
the worst residual it saw per named quantity, and lands in the report as
one record: id, anchor (the defining identity it exercises, in plain ASCII,
or "plumbing" for infrastructure), status, residuals, elapsed seconds.
Reports from the same seed and config are identical apart from the elapsed
fields.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from . import chains, drazin
from .chains import (chain_report, decomposition_index_equality,
                     index_stability, kato_decomposition, perturb_expand,
                     quasinilpotent_part, analytic_core)
from .corpus import generate_corpus
from .errors import PreconditionError
from .exactnum import QComplex
from .linalg import rank as matrix_rank
from .operators import (DirectSum, Identity, Scaled, SumOp, ZeroOp,
                        left_shift, right_shift, op_from_spec,
                        qnil_certificate, verify_on_basis)
from .witnesses import (commutant_invariance, left_resolvent,
                        neumann_inverse, one_sided_bundle,
                        operator_adjoint_duality, quasipolar_left_witness,
                        resolvent_ring_points, uniqueness_window,
                        vanishing_row_witness, window_axiom_report)

__all__ = ["RunConfig", "run_suite", "format_report", "SUITE_NAMES"]

SCHEMA_VERSION = 1
SUITE_NAMES = ("drazin", "operator", "structure", "all")


@dataclass
class RunConfig:
    seed: int = 1
    tol: float | None = None
    window: int = 128
    corpus_size: int = 25
    out: str | None = None
    fmt: str = "json"

    def validate(self):
        problems = []
        if not (0 <= self.seed < 2 ** 64):
            problems.append(f"seed must fit in 64 bits, got {self.seed}")
        if self.tol is not None and not self.tol > 0:
            problems.append(f"tol must be positive, got {self.tol}")
        if self.window < 8:
            problems.append(f"window must be at least 8, got {self.window}")
        if self.corpus_size < 1:
            problems.append(
                f"corpus size must be at least 1, got {self.corpus_size}")
        if self.fmt not in ("json", "text"):
            problems.append(f"format must be json or text, got {self.fmt!r}")
        if problems:
            raise ValueError("; ".join(problems))
        return self


def _reraise(exc):
    def fn():
        raise exc
    return fn


class _Tally:
    """Accumulates per-check worst residuals, verdicts and elapsed time."""

    def __init__(self):
        self.order: list = []
        self.kinds: dict = {}

    def add(self, cid: str, anchor: str, fn):
        """fn() -> (residuals: dict[str, float], ok: bool).  Exceptions are
        recorded as failures, never propagated."""
        rec = self.kinds.get(cid)
        if rec is None:
            rec = {"anchor": anchor, "residuals": {}, "ok": True,
                   "elapsed": 0.0, "count": 0, "notes": []}
            self.kinds[cid] = rec
            self.order.append(cid)
        t0 = time.perf_counter()
        try:
            residuals, ok = fn()
        except Exception as exc:
            residuals, ok = {}, False
            if len(rec["notes"]) < 8:
                rec["notes"].append(f"{type(exc).__name__}: {exc}")
        rec["elapsed"] += time.perf_counter() - t0
        rec["count"] += 1
        rec["ok"] = rec["ok"] and ok
        for key, val in residuals.items():
            val = float(val)
            if key not in rec["residuals"] or val > rec["residuals"][key]:
                rec["residuals"][key] = val

    def records(self) -> list:
        out = []
        for cid in self.order:
            rec = self.kinds[cid]
            row = {"id": cid, "anchor": rec["anchor"],
                   "status": "pass" if rec["ok"] else "fail",
                   "residuals": rec["residuals"], "count": rec["count"],
                   "elapsed_s": rec["elapsed"]}
            if rec["notes"]:
                row["notes"] = rec["notes"]
            out.append(row)
        return out


# ---------------------------------------------------------------------------
# matrix inverse suite


def _drazin_checks(cfg: RunConfig) -> list:
    tally = _Tally()
    tol = cfg.tol
    for gm in generate_corpus(cfg.seed, cfg.corpus_size):
        A = gm.matrix
        try:
            res = drazin.drazin_inverse(A, tol)
        except Exception as exc:
            tally.add("left_triple", "axa=xa^2; x^2a=x; xa^{j+1}=a^j",
                      _reraise(exc))
            continue
        X, j, P = res.inverse, res.index, res.idempotent

        def commute():
            r = res.residuals
            return {"r_weak_commute": r.r_weak_commute}, \
                r.r_weak_commute <= 1e-8
        tally.add("two_sided_commute", "ax=xa", commute)

        def left_triple():
            r = drazin.check_left_drazin(A, X, j)
            return r.as_dict(), r.passes(1e-8)
        tally.add("left_triple", "axa=xa^2; x^2a=x; xa^{j+1}=a^j",
                  left_triple)

        def right_triple():
            r = drazin.check_right_drazin(A, X, j)
            return r.as_dict(), r.passes(1e-8)
        tally.add("right_triple", "aya=a^2y; ay^2=y; a^{j+1}y=a^j",
                  right_triple)

        tally.add("index_ground_truth", "rank a^{k+1}=rank a^k at k=ind a",
                  lambda: ({"index_gap": abs(j - gm.index)}, j == gm.index))

        def oracle():
            Y = drazin.drazin_pinv_oracle(A, max(j, 1), tol)
            dev = float(np.linalg.norm(X - Y)) \
                / max(float(np.linalg.norm(X)), 1e-300)
            return {"oracle_dev": dev}, dev <= 1e-8
        tally.add("oracle_agreement", "x=a^k (a^{2k+1})^+ a^k", oracle)

        def idem_roundtrip():
            P2 = drazin.spectral_idempotent_left(A, X)
            X2 = drazin.inverse_from_idempotent(A, P2, "left")
            scale = max(float(np.linalg.norm(X)), 1e-300)
            dev = float(np.linalg.norm(X - X2)) / scale
            pdev = float(np.linalg.norm(P - P2)) / max(1.0, float(np.linalg.norm(P)))
            return {"roundtrip_dev": dev, "idempotent_dev": pdev}, \
                max(dev, pdev) <= 1e-9
        tally.add("idempotent_roundtrip", "p=1-xa", idem_roundtrip)

        def merge():
            Z = drazin.merge_two_sided(A, X, X, j)
            dev = float(np.linalg.norm(Z - X)) \
                / max(float(np.linalg.norm(X)), 1e-300)
            return {"merge_dev": dev}, dev <= 1e-9
        tally.add("merge_two_sided", "xa^{j+1}=a^j=a^{j+1}y -> x=y", merge)

        def equations():
            out = drazin.matrix_equation_equivalence(A, tol)
            return {"system_dev": out["deviation"]}, \
                out["deviation"] <= 1e-9
        tally.add("equation_equivalence",
                  "xax=x & xa^{j+1}=a^j <-> ax=xa & x^2a=x", equations)

        def nilres():
            r_sq, r_ord = drazin.residual_nilpotency(A, X, j)
            return {"r_square": r_sq, "r_order": r_ord}, \
                max(r_sq, r_ord) <= 1e-8
        tally.add("residual_nilpotency", "r=a-axa; r^2=ar; r^j=0", nilres)

        def plift():
            m = 2 if j <= 1 else j
            Xn = drazin.power_lift(X, A, m, j)
            An, floor = drazin._formed_power(A, m)
            if float(np.linalg.norm(An, 2)) <= floor:
                # lift degenerates to 0 = 0, already verified inside
                return {"power_lift": 0.0}, True
            r = drazin.check_left_drazin(An, Xn, j)
            return {"power_lift": r.max}, r.max <= 1e-8
        tally.add("power_lift", "x^n left-inverts a^n", plift)

        def glift():
            m = max(j, 1)
            Xn = drazin.power_lift(X, A, m, j)
            Z = drazin.group_lift(A, Xn, m)
            dev = float(np.linalg.norm(Z - X)) \
                / max(float(np.linalg.norm(X)), 1e-300)
            return {"group_lift_dev": dev}, dev <= 1e-8
        tally.add("group_lift", "z=x a^{n-1} recovers the inverse of a",
                  glift)

        def duality():
            out = drazin.adjoint_duality(A, X, j)
            return {"duality": out["max"]}, out["max"] <= 1e-10
        tally.add("adjoint_duality", "(a*)(x*)(a*)=(a*)^2(x*)", duality)

        def bc():
            out = drazin.bc_witness(A, X, j)
            return out, max(out.values()) <= 1e-8
        tally.add("bc_witness", "x=x^{j+1}a^j; xa^{j+1}=a^j", bc)
    return tally.records()


# ---------------------------------------------------------------------------
# banded operator suite


def _operator_checks(cfg: RunConfig) -> list:
    tally = _Tally()
    N = cfg.window
    b = one_sided_bundle()

    def axioms():
        rep = window_axiom_report(b.T, b.S1, N, "left")
        return {"dev_weak_commute": rep["dev_weak_commute"],
                "dev_inner": rep["dev_inner"]}, rep["max"] == 0.0
    tally.add("window_axioms", "t s1 t=s1 t^2; s1^2 t=s1", axioms)

    def idem():
        dev = verify_on_basis(b.P, b.P_structural, N)
        return {"dev": dev}, dev == 0.0
    tally.add("idempotent_form", "p=1-s1 t", idem)

    def commuting():
        d1 = verify_on_basis(b.T @ b.P, b.P @ b.T, N)
        d2 = verify_on_basis(b.T @ b.P, b.TP_structural, N)
        return {"dev_tp_pt": d1, "dev_tp_structural": d2}, \
            max(d1, d2) == 0.0
    tally.add("commuting_product", "t p=p t", commuting)

    def decay():
        worst = 0.0
        for m in range(1, 21):
            v, tight = b.T2.power_norm(m)
            expect = Fraction(1, factorial(m))
            worst = max(worst, abs(float((Fraction(v) - expect) / expect)))
            if not tight:
                return {"rel_dev": worst}, False
        return {"rel_dev": worst}, worst <= 1e-12
    tally.add("power_decay_law", "|t2^n e1|=1/n!", decay)

    def qroot():
        cert = qnil_certificate(b.T2)
        root = cert["samples"][-1][2]
        return {"root_n60": root}, bool(cert["verdict"] and root < 0.05)
    tally.add("qnil_root", "|t2^n|^{1/n} -> 0", qroot)

    def norow():
        w = vanishing_row_witness(b.t_plus_p)
        return {}, bool(w["vanishes"])
    tally.add("noninvertible_row", "e1 orthogonal to range(t+p)", norow)

    def neumann():
        dev = verify_on_basis(
            b.t_plus_p_left_inverse @ b.t_plus_p, Identity(), min(N, 64))
        budget = float(b.neumann_budget)
        return {"dev": dev, "budget": budget}, dev <= budget
    tally.add("neumann_budget", "(1+t2)^{-1}=sum (-t2)^k", neumann)

    def quasipolar():
        qp = quasipolar_left_witness(b.T, b.S1, min(N, 96))
        res = {k: v for k, v in qp.items()
               if isinstance(v, float)}
        return res, qp["max"] == 0.0
    tally.add("quasipolar_roundtrip", "q=s1 t; b=q s1 q; b t=q", quasipolar)

    def commutant():
        worst = 0.0
        poly = SumOp((Scaled(2, Identity()), Scaled(3, b.T),
                      (b.T @ b.T @ b.T)))
        for W in (Identity(), b.T, b.T @ b.T, poly):
            ci = commutant_invariance(b.T, b.S1, W, min(N, 64))
            worst = max(worst, ci["dev_invariance"])
        return {"dev_invariance": worst}, worst <= 1e-12
    tally.add("commutant_invariance", "w p=p w p", commutant)

    def adjoint_win():
        ad = operator_adjoint_duality(b.T, b.S1, min(N, 96))
        return {"dev": ad["max"]}, ad["max"] == 0.0
    tally.add("adjoint_window", "t* s1* t*=(t*)^2 s1*", adjoint_win)

    def uniq():
        Tfull = Identity() + b.T2
        Sl, _ = neumann_inverse(b.T2, 40)
        Sr, _ = neumann_inverse(b.T2, 48)
        uq = uniqueness_window(Tfull, Sl, Sr, N, tol=1e-10)
        return {"deviation": uq["deviation"]}, True
    tally.add("uniqueness_window", "s_left=s_right", uniq)

    def resolvent():
        r = left_resolvent(right_shift(), ZeroOp(), Fraction(1, 4),
                           K=64, n_cols=64)
        return {"residual": r["window_residual"],
                "bound": r["remainder_bound"]}, \
            r["remainder_bound"] < 1e-36
    tally.add("resolvent_shift", "l(lambda-t)=1 on the window", resolvent)

    def ring():
        c12, bud = neumann_inverse(b.T2, 12)
        cb = DirectSum((left_shift(), c12))
        worst = 0.0
        for pt in resolvent_ring_points():
            r = left_resolvent(b.T, b.P_structural, pt, K=20, J=36,
                               c=cb, c_budget=bud, tp=b.TP_structural,
                               n_cols=8)
            worst = max(worst, r["window_residual"])
        return {"worst_residual": worst,
                "bound": r["remainder_bound"]}, True
    tally.add("resolvent_ring", "l exists for 0<|lambda|=1/5", ring)

    def serde():
        ops = [b.T, b.S1, b.TP_structural,
               Scaled(QComplex(Fraction(1, 5), Fraction(2, 7)), b.T2),
               op_from_spec({"kind": "weighted_shift", "direction": "right",
                             "weights": ["1", "1/2"], "tail": "1/3"})]
        worst = 0.0
        for op in ops:
            worst = max(worst, verify_on_basis(op_from_spec(op.to_spec()),
                                               op, 32))
        return {"roundtrip_dev": worst}, worst == 0.0
    tally.add("operator_serde", "plumbing", serde)
    return tally.records()


# ---------------------------------------------------------------------------
# chain structure suite


def _structure_checks(cfg: RunConfig) -> list:
    tally = _Tally()
    tol = cfg.tol
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x57]))
    for gm in generate_corpus(cfg.seed, cfg.corpus_size):
        A = gm.matrix
        n = A.shape[0]
        try:
            rep = chain_report(A, tol)
        except Exception as exc:
            tally.add("chain_identities",
                      "null step=meet; rank step=n-join", _reraise(exc))
            continue

        tally.add("chain_identities", "null step=meet; rank step=n-join",
                  lambda: ({}, True))
        tally.add("asc_dsc_index", "asc=dsc=ind=dis",
                  lambda: ({}, rep.asc == rep.dsc == rep.dis == gm.index))

        def split():
            h0 = quasinilpotent_part(A, tol)
            k0 = analytic_core(A, tol)
            joint = np.hstack([h0.vectors, k0.vectors])
            return {}, (h0.dim + k0.dim == n
                        and matrix_rank(joint) == n
                        and h0.dim == n - gm.core_dim)
        tally.add("core_nil_split", "h0 (+) k = whole space", split)

        def bf():
            vals = {chains._bf_from_report(rep, m)
                    for m in (rep.dis, rep.dis + 1, n + 1)}
            return {}, vals == {0}
        tally.add("bf_index_zero", "meet_n-(n-join_n)=0", bf)

        def kato():
            kd = kato_decomposition(A, tol)
            worst = max(kd.residuals["invariance_core"],
                        kd.residuals["invariance_nil"])
            return {"invariance": worst}, \
                kd.residuals["nil_order"] == (rep.asc if kd.nil.dim else 0)
        tally.add("kato_blocks", "a|_m invertible; a|_n nilpotent", kato)

        def restricted():
            out = decomposition_index_equality(A, tol)
            return {}, out["index"] == out["index_restricted"] == 0
        tally.add("restricted_index", "ind(t)=ind(t|_m)", restricted)

        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        F = 0.3 * np.outer(u, v.conj())

        def perturb():
            pr = perturb_expand(A, F, 3)
            scale = max(float(np.linalg.norm(A + F, 2)),
                        float(np.linalg.norm(A, 2)), 1e-300) ** 3
            rel = pr.expansion_residual / scale
            ok = (rel <= 1e-12
                  and matrix_rank(pr.F1) <= 3 * matrix_rank(F)
                  and pr.essential_dim_gap <= 3 * matrix_rank(F))
            return {"rel_residual": rel}, ok
        tally.add("perturb_expansion", "(t+f)^n=t^n+f1", perturb)

        def stability():
            st = index_stability(A, F, tol)
            return {}, st["index_before"] == st["index_after"] == 0
        tally.add("index_stability", "ind(t)=ind(t+f)", stability)

        def scan():
            extra = [complex(z) for z in
                     rng.standard_normal(2) + 1j * rng.standard_normal(2)]
            records = drazin.spectra_scan(A, extra, tol)
            worst = max(max(r["left"].max, r["right"].max)
                        for r in records)
            return {"worst_shift_residual": worst}, worst <= 1e-8
        tally.add("spectra_scan", "lambda-a drazin invertible, all lambda",
                  scan)
    return tally.records()


# ---------------------------------------------------------------------------
# assembly


_SUITES = {
    "drazin": _drazin_checks,
    "operator": _operator_checks,
    "structure": _structure_checks,
}


def run_suite(name: str, cfg: RunConfig) -> dict:
    """Execute a named suite (or 'all') and assemble the report dictionary.

    Check failures never raise; they mark their record failed, and the
    summary decides the process exit code.
    """
    cfg.validate()
    if name not in SUITE_NAMES:
        raise ValueError(
            f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    if name == "all":
        checks = []
        for part in ("drazin", "operator", "structure"):
            checks.extend(_SUITES[part](cfg))
    else:
        checks = _SUITES[name](cfg)
    passed = sum(1 for c in checks if c["status"] == "pass")
    return {
        "schema": SCHEMA_VERSION,
        "suite": name,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "window": cfg.window,
        "corpus_size": cfg.corpus_size,
        "checks": checks,
        "summary": {"total": len(checks), "passed": passed,
                    "failed": len(checks) - passed},
    }


def format_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        import json

        return json.dumps(report, sort_keys=True, indent=2,
                          default=_json_default) + "\n"
    lines = [f"suite {report['suite']}  seed {report['seed']}  "
             f"corpus {report['corpus_size']}  window {report['window']}"]
    for c in report["checks"]:
        worst = max(c["residuals"].values(), default=0.0)
        lines.append(f"{c['status'].upper():4s} {c['id']:24s} "
                     f"worst {worst:9.3e}  [{c['anchor']}]")
        for note in c.get("notes", []):
            lines.append(f"     ! {note}")
    s = report["summary"]
    lines.append(f"summary {s['passed']}/{s['total']} passed")
    return "\n".join(lines) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
