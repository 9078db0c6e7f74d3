"""Banded operators on one-sided sequence space with lazy exact columns.

Operators act on square-summable sequences over the basis e_1, e_2, ...
Each operator knows a band (column j is supported on rows j+lo .. j+hi) and
produces columns on demand as finite tuples of (row, coefficient) pairs.
Coefficients follow the contract of exactnum: int, Fraction and QComplex
arithmetic stays exact, floats degrade to machine complex.

Nothing here ever materializes an infinite matrix.  Compositions evaluate
columns by pushing a basis vector through the factor list, so powers of
band-1 shifts cost O(n) work per column instead of O(n^2) storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BandwidthCapError
from .exactnum import QComplex, abs2, conj, format_rational, parse_rational, to_complex

__all__ = [
    "BAND_CAP", "WeightRule", "BandedOp", "ZeroOp", "Identity", "Shift",
    "Scaled", "SumOp", "ComposeOp", "DirectSum", "AdjointOp", "RuleOp",
    "right_shift", "left_shift", "basis_vector", "apply_power",
    "verify_on_basis", "qnil_certificate", "op_from_spec",
]

# columns may not reach further than this from the diagonal
BAND_CAP = 4096


# ---------------------------------------------------------------------------
# coefficient serialization

def encode_coeff(x):
    """JSON-able form.  Exact values become strings or {re, im} string pairs;
    raw JSON numbers always mean floats."""
    if isinstance(x, (int, Fraction)):
        return format_rational(x)
    if isinstance(x, QComplex):
        return {"re": format_rational(x.re), "im": format_rational(x.im)}
    if isinstance(x, float):
        return x
    z = complex(x)
    return {"re_f": z.real, "im_f": z.imag}


def decode_coeff(d):
    if isinstance(d, str):
        return parse_rational(d)
    if isinstance(d, dict):
        if "re" in d:
            return QComplex(parse_rational(d["re"]), parse_rational(d["im"]))
        return complex(d["re_f"], d["im_f"])
    if isinstance(d, (int, float)):
        return float(d)
    raise ValueError(f"cannot decode coefficient {d!r}")


# ---------------------------------------------------------------------------
# weight rules


@dataclass(frozen=True)
class WeightRule:
    """Weight sequence w_1, w_2, ... for shift operators.

    kinds:
      ones        w_j = 1
      reciprocal  w_j = 1/j
      listtail    w_j = head[j-1] for j <= len(head), else tail

    Weights are nonnegative rationals so that window products, and with them
    the structural norms of shift powers, stay exact.
    """

    kind: str
    head: tuple = ()
    tail: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("ones", "reciprocal", "listtail"):
            raise ValueError(f"unknown weight rule kind {self.kind!r}")
        for w in self.head:
            if not isinstance(w, (int, Fraction)) or w < 0:
                raise ValueError("weights must be nonnegative rationals")
        if not isinstance(self.tail, (int, Fraction)) or self.tail < 0:
            raise ValueError("weights must be nonnegative rationals")

    @staticmethod
    def ones() -> "WeightRule":
        return WeightRule("ones")

    @staticmethod
    def reciprocal() -> "WeightRule":
        return WeightRule("reciprocal")

    @staticmethod
    def from_list(head, tail) -> "WeightRule":
        return WeightRule("listtail", tuple(Fraction(w) for w in head),
                          Fraction(tail))

    def weight(self, j: int) -> Fraction:
        if j < 1:
            raise ValueError("weights are indexed from 1")
        if self.kind == "ones":
            return Fraction(1)
        if self.kind == "reciprocal":
            return Fraction(1, j)
        if j <= len(self.head):
            return Fraction(self.head[j - 1])
        return self.tail

    def max_window(self, n: int, j_min: int) -> Fraction:
        """Largest product of n consecutive weights starting at or past j_min.

        For a decreasing rule the first window wins; for listtail only the
        windows overlapping the head differ, everything past it equals
        tail^n.  Exact in all cases.
        """
        if n < 1:
            raise ValueError("window length must be positive")
        if j_min < 1:
            raise ValueError("start index must be positive")
        if self.kind == "ones":
            return Fraction(1)
        if self.kind == "reciprocal":
            prod = Fraction(1)
            for t in range(n):
                prod /= j_min + t
            return prod
        last_start = max(j_min, len(self.head) + 1)
        best = Fraction(0)
        for s in range(j_min, last_start + 1):
            prod = Fraction(1)
            for t in range(n):
                prod *= self.weight(s + t)
            if prod > best:
                best = prod
        return best

    def to_dict(self) -> dict:
        if self.kind == "listtail":
            return {"kind": "listtail",
                    "head": [format_rational(w) for w in self.head],
                    "tail": format_rational(self.tail)}
        return {"kind": self.kind}

    @staticmethod
    def from_dict(d: dict) -> "WeightRule":
        kind = d["kind"]
        if kind == "listtail":
            return WeightRule.from_list([parse_rational(w) for w in d["head"]],
                                        parse_rational(d["tail"]))
        return WeightRule(kind)


# ---------------------------------------------------------------------------
# the operator hierarchy


def _merge_into(acc: dict, i: int, w):
    cur = acc.get(i)
    cur = w if cur is None else cur + w
    if cur:
        acc[i] = cur
    elif i in acc:
        del acc[i]


def basis_vector(j: int) -> dict:
    if j < 1:
        raise ValueError("basis indices start at 1")
    return {j: 1}


class BandedOp:
    """Base class.  Subclasses set band_lo/band_hi and implement column()."""

    band_lo = 0
    band_hi = 0

    def _set_band(self, lo: int, hi: int):
        if max(abs(lo), abs(hi)) > BAND_CAP:
            raise BandwidthCapError(
                f"band [{lo}, {hi}] exceeds the cap {BAND_CAP}")
        self.band_lo = lo
        self.band_hi = hi

    def column(self, j: int) -> tuple:
        raise NotImplementedError

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        for j, w in vec.items():
            if not w:
                continue
            for i, c in self.column(j):
                _merge_into(out, i, w * c)
        return out

    # -- algebra ----------------------------------------------------------

    def __matmul__(self, other: "BandedOp") -> "BandedOp":
        return ComposeOp((self, other))

    def __add__(self, other: "BandedOp") -> "BandedOp":
        return SumOp((self, other))

    def __sub__(self, other: "BandedOp") -> "BandedOp":
        return SumOp((self, Scaled(-1, other)))

    def __neg__(self) -> "BandedOp":
        return Scaled(-1, self)

    def scale(self, factor) -> "BandedOp":
        return Scaled(factor, self)

    def adjoint(self) -> "BandedOp":
        return AdjointOp(self)

    def power(self, n: int) -> "BandedOp":
        if n < 0:
            raise ValueError("operator powers are nonnegative")
        if n == 0:
            return Identity()
        return ComposeOp((self,) * n)

    # -- analysis ---------------------------------------------------------

    def power_norm(self, n: int):
        """(value, tight): the operator norm of the n-th power, or an upper
        bound when tight is False.  Exact rationals where the structure
        allows."""
        raise TypeError(f"{type(self).__name__} has no structural norm")

    def matrix(self, n: int):
        """Dense leading n x n corner (entries beyond it are dropped)."""
        import numpy as np
        M = np.zeros((n, n), dtype=np.complex128)
        for j in range(1, n + 1):
            for i, w in self.column(j):
                if 1 <= i <= n:
                    M[i - 1, j - 1] = to_complex(w)
        return M

    def to_spec(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not serializable")


class ZeroOp(BandedOp):
    def column(self, j: int) -> tuple:
        return ()

    def power_norm(self, n: int):
        return Fraction(0), True

    def adjoint(self) -> "BandedOp":
        return self

    def to_spec(self) -> dict:
        return {"kind": "zero"}


class Identity(BandedOp):
    def column(self, j: int) -> tuple:
        return ((j, 1),)

    def power_norm(self, n: int):
        return Fraction(1), True

    def adjoint(self) -> "BandedOp":
        return self

    def to_spec(self) -> dict:
        return {"kind": "identity"}


class Shift(BandedOp):
    """Weighted shift.

    right:  e_j -> w_j e_(j+1)
    left:   e_j -> w_j e_(j-1) for j >= 2, e_1 -> 0

    Powers have exact norms: the n-th power scales e_j by a product of n
    consecutive weights, so its norm is the best such window.  Right shifts
    see windows from j = 1, left shifts only from j = 2.
    """

    def __init__(self, direction: str, rule: WeightRule | None = None):
        if direction not in ("left", "right"):
            raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
        self.direction = direction
        self.rule = WeightRule.ones() if rule is None else rule
        step = 1 if direction == "right" else -1
        self._set_band(step, step)

    def column(self, j: int) -> tuple:
        if self.direction == "right":
            w = self.rule.weight(j)
            return ((j + 1, w),) if w else ()
        if j < 2:
            return ()
        w = self.rule.weight(j)
        return ((j - 1, w),) if w else ()

    def power_norm(self, n: int):
        if n == 0:
            return Fraction(1), True
        j_min = 1 if self.direction == "right" else 2
        # the n-th power of a left shift needs source index >= n+1, so its
        # windows end at j and start at j-n+1 >= 2
        return self.rule.max_window(n, j_min), True

    def adjoint(self) -> "BandedOp":
        if self.rule.kind == "ones":
            other = "left" if self.direction == "right" else "right"
            return Shift(other, self.rule)
        return AdjointOp(self)

    def to_spec(self) -> dict:
        return {"kind": "shift", "direction": self.direction,
                "rule": self.rule.to_dict()}


def right_shift(rule: WeightRule | None = None) -> Shift:
    return Shift("right", rule)


def left_shift(rule: WeightRule | None = None) -> Shift:
    return Shift("left", rule)


def _abs_pow(factor, n: int):
    """|factor|^n, exact Fraction when representable, float otherwise."""
    a2 = abs2(factor)
    if isinstance(a2, (int, Fraction)):
        a2 = Fraction(a2)
        if n % 2 == 0:
            return a2 ** (n // 2)
        rn = math.isqrt(a2.numerator)
        rd = math.isqrt(a2.denominator)
        if rn * rn == a2.numerator and rd * rd == a2.denominator:
            return a2 ** (n // 2) * Fraction(rn, rd)
        return float(a2) ** (n / 2.0)
    return float(a2) ** (n / 2.0)


class Scaled(BandedOp):
    def __init__(self, factor, inner: BandedOp):
        # collapse nested scalings so factor arithmetic stays in one place
        while isinstance(inner, Scaled):
            factor = factor * inner.factor
            inner = inner.inner
        self.factor = factor
        self.inner = inner
        self._set_band(inner.band_lo, inner.band_hi)

    def column(self, j: int) -> tuple:
        if not self.factor:
            return ()
        return tuple((i, self.factor * w) for i, w in self.inner.column(j))

    def apply(self, vec: dict) -> dict:
        if not self.factor:
            return {}
        out = self.inner.apply(vec)
        return {i: self.factor * w for i, w in out.items()}

    def power_norm(self, n: int):
        v, tight = self.inner.power_norm(n)
        a = _abs_pow(self.factor, n)
        if isinstance(a, Fraction) and isinstance(v, (int, Fraction)):
            return a * v, tight
        return float(a) * float(v), tight

    def adjoint(self) -> "BandedOp":
        return Scaled(conj(self.factor), self.inner.adjoint())

    def to_spec(self) -> dict:
        return {"kind": "scale", "factor": encode_coeff(self.factor),
                "inner": self.inner.to_spec()}


class SumOp(BandedOp):
    def __init__(self, terms):
        flat = []
        for t in terms:
            if isinstance(t, SumOp):
                flat.extend(t.terms)
            elif not isinstance(t, ZeroOp):
                flat.append(t)
        self.terms = tuple(flat)
        if self.terms:
            self._set_band(min(t.band_lo for t in self.terms),
                           max(t.band_hi for t in self.terms))

    def column(self, j: int) -> tuple:
        acc: dict = {}
        for t in self.terms:
            for i, w in t.column(j):
                _merge_into(acc, i, w)
        return tuple(sorted(acc.items()))

    def apply(self, vec: dict) -> dict:
        acc: dict = {}
        for t in self.terms:
            for i, w in t.apply(vec).items():
                _merge_into(acc, i, w)
        return acc

    def power_norm(self, n: int):
        # triangle inequality on the single norms, then submultiplicativity
        total = Fraction(0)
        for t in self.terms:
            v, _ = t.power_norm(1)
            total = total + v if isinstance(v, (int, Fraction)) else float(total) + float(v)
        if isinstance(total, Fraction):
            bound = total ** n
        else:
            bound = float(total) ** n
        tight = len(self.terms) <= 1
        return bound, tight

    def adjoint(self) -> "BandedOp":
        return SumOp(tuple(t.adjoint() for t in self.terms))

    def to_spec(self) -> dict:
        return {"kind": "sum", "terms": [t.to_spec() for t in self.terms]}


class ComposeOp(BandedOp):
    """Product of factors, applied rightmost first.

    Factor lists flatten, so chains of @ never nest deeply and columns are
    evaluated iteratively by pushing a basis vector through the chain.
    """

    def __init__(self, factors):
        flat = []
        for f in factors:
            if isinstance(f, ComposeOp):
                flat.extend(f.factors)
            elif isinstance(f, Identity):
                continue
            else:
                flat.append(f)
        if not flat:
            flat = [Identity()]
        self.factors = tuple(flat)
        self._set_band(sum(f.band_lo for f in self.factors),
                       sum(f.band_hi for f in self.factors))

    def column(self, j: int) -> tuple:
        vec = basis_vector(j)
        for f in reversed(self.factors):
            vec = f.apply(vec)
            if not vec:
                return ()
        return tuple(sorted(vec.items()))

    def apply(self, vec: dict) -> dict:
        for f in reversed(self.factors):
            vec = f.apply(vec)
            if not vec:
                return {}
        return vec

    def power_norm(self, n: int):
        # runs of one repeated factor are powers of it, and a power of a
        # shift has an exact norm; only distinct neighbours pay the
        # submultiplicative penalty
        runs: list = []
        for f in self.factors:
            if runs and runs[-1][0] is f:
                runs[-1][1] += 1
            else:
                runs.append([f, 1])
        if len(runs) == 1:
            f, m = runs[0]
            return f.power_norm(m * n)
        bound = Fraction(1)
        for f, m in runs:
            v, _ = f.power_norm(m)
            bound = bound * v
        return bound ** n, False

    def adjoint(self) -> "BandedOp":
        return ComposeOp(tuple(f.adjoint() for f in reversed(self.factors)))

    def to_spec(self) -> dict:
        return {"kind": "compose", "factors": [f.to_spec() for f in self.factors]}


class DirectSum(BandedOp):
    """Interleaved direct sum of m blocks.

    Block b (1-based) of m lives on the basis indices b, b+m, b+2m, ...
    so basis index (q-1)*m + b corresponds to local index q in block b.
    Interleaving keeps every block visible in any leading corner.
    """

    def __init__(self, blocks):
        self.blocks = tuple(blocks)
        if not self.blocks:
            raise ValueError("need at least one block")
        m = len(self.blocks)
        self._set_band(m * min(b.band_lo for b in self.blocks),
                       m * max(b.band_hi for b in self.blocks))

    def column(self, j: int) -> tuple:
        m = len(self.blocks)
        b = (j - 1) % m
        q = (j - 1) // m + 1
        out = []
        for qq, w in self.blocks[b].column(q):
            out.append(((qq - 1) * m + b + 1, w))
        return tuple(sorted(out))

    def power_norm(self, n: int):
        # the norm of a direct sum is the largest block norm
        best, tight = Fraction(0), True
        for blk in self.blocks:
            v, t = blk.power_norm(n)
            tight = tight and t
            if float(v) > float(best):
                best = v
        return best, tight

    def adjoint(self) -> "BandedOp":
        return DirectSum(tuple(b.adjoint() for b in self.blocks))

    def to_spec(self) -> dict:
        return {"kind": "direct_sum",
                "blocks": [b.to_spec() for b in self.blocks]}


class AdjointOp(BandedOp):
    """Conjugate transpose.  Column j collects row j of the inner operator,
    which the band confines to finitely many inner columns."""

    def __init__(self, inner: BandedOp):
        self.inner = inner
        self._set_band(-inner.band_hi, -inner.band_lo)

    def column(self, j: int) -> tuple:
        lo = max(1, j - self.inner.band_hi)
        hi = max(0, j - self.inner.band_lo)
        out = []
        for i in range(lo, hi + 1):
            for row, w in self.inner.column(i):
                if row == j and w:
                    out.append((i, conj(w)))
        return tuple(sorted(out))

    def power_norm(self, n: int):
        # powers of the adjoint are adjoints of powers, same norms
        return self.inner.power_norm(n)

    def adjoint(self) -> "BandedOp":
        return self.inner

    def to_spec(self) -> dict:
        return {"kind": "adjoint", "inner": self.inner.to_spec()}


class RuleOp(BandedOp):
    """Operator from an arbitrary column callable with a declared band.

    The callable must keep its support inside the band; nothing checks it.
    Not serializable and carries no structural norm.
    """

    def __init__(self, fn, band_lo: int, band_hi: int):
        self.fn = fn
        self._set_band(band_lo, band_hi)

    def column(self, j: int) -> tuple:
        return tuple(self.fn(j))


# ---------------------------------------------------------------------------
# verification helpers


def apply_power(op: BandedOp, vec: dict, n: int) -> dict:
    for _ in range(n):
        vec = op.apply(vec)
        if not vec:
            return {}
    return vec


def verify_on_basis(a: BandedOp, b: BandedOp, n_cols: int) -> float:
    """Largest column deviation ||(a - b) e_j||_2 over j = 1..n_cols.

    Differences are accumulated exactly for exact coefficients, so equality
    of two structurally different builds comes out as literal 0.0.
    """
    worst = Fraction(0)
    worst_is_exact = True
    for j in range(1, n_cols + 1):
        acc: dict = {}
        for i, w in a.column(j):
            _merge_into(acc, i, w)
        for i, w in b.column(j):
            _merge_into(acc, i, -w)
        s = Fraction(0)
        exact = True
        for w in acc.values():
            a2 = abs2(w)
            if isinstance(a2, (int, Fraction)):
                s = s + a2 if exact else float(s) + float(a2)
            else:
                s = float(s) + float(a2)
                exact = False
        if float(s) > float(worst):
            worst, worst_is_exact = s, exact
    if worst_is_exact and isinstance(worst, Fraction):
        if worst == 0:
            return 0.0
        return math.sqrt(float(worst))
    return math.sqrt(float(worst))


def qnil_certificate(op: BandedOp, n_max: int = 60, threshold: float = 0.05,
                     start: int = 2, step: int = 2) -> dict:
    """Sampled norm-root decay certificate.

    Samples (n, bound, root) with bound an upper estimate of the norm of
    the n-th power and root = bound^(1/n), at n = start, start+step, ...,
    n_max.  The verdict demands the last root below the threshold and no
    increase across the trailing half of the samples.  Non-tight bounds
    still certify a pass; they can only make the verdict harder to reach.
    """
    if n_max < start:
        raise ValueError("n_max must reach the first sample")
    samples = []
    all_tight = True
    for n in range(start, n_max + 1, step):
        v, tight = op.power_norm(n)
        all_tight = all_tight and tight
        samples.append((n, float(v), _norm_root(v, n)))
    tail = samples[len(samples) // 2:]
    nonincreasing = all(tail[k + 1][2] <= tail[k][2] * (1 + 1e-12)
                        for k in range(len(tail) - 1))
    verdict = bool(samples[-1][2] < threshold and nonincreasing)
    return {"samples": samples, "verdict": verdict, "threshold": threshold,
            "tight": all_tight}


def _norm_root(v, n: int) -> float:
    """v^(1/n) in float, via logs of the exact parts so that tiny rationals
    like inverse factorials survive the conversion."""
    if isinstance(v, (int, Fraction)):
        f = Fraction(v)
        if f == 0:
            return 0.0
        ln = math.log(f.numerator) - math.log(f.denominator)
        return math.exp(ln / n)
    fv = float(v)
    if fv == 0.0:
        return 0.0
    return fv ** (1.0 / n)


# ---------------------------------------------------------------------------
# deserialization


def op_from_spec(d: dict) -> BandedOp:
    """Rebuild an operator from its to_spec() dictionary.

    Accepted kinds: zero, identity, shift, weighted_shift, scale (alias
    scaled), sum, compose, direct_sum, adjoint.  A shift may carry a "rule"
    dictionary; a weighted_shift instead lists explicit "weights" as exact
    rational strings with an optional "tail" (default 0 past the list).
    """
    kind = d.get("kind")
    if kind == "zero":
        return ZeroOp()
    if kind == "identity":
        return Identity()
    if kind == "shift":
        rule = WeightRule.from_dict(d["rule"]) if "rule" in d else None
        return Shift(d["direction"], rule)
    if kind == "weighted_shift":
        head = [parse_rational(w) for w in d["weights"]]
        tail = parse_rational(d["tail"]) if "tail" in d else Fraction(0)
        return Shift(d["direction"], WeightRule.from_list(head, tail))
    if kind in ("scale", "scaled"):
        return Scaled(decode_coeff(d["factor"]), op_from_spec(d["inner"]))
    if kind == "sum":
        return SumOp(tuple(op_from_spec(t) for t in d["terms"]))
    if kind == "compose":
        return ComposeOp(tuple(op_from_spec(f) for f in d["factors"]))
    if kind == "direct_sum":
        return DirectSum(tuple(op_from_spec(b) for b in d["blocks"]))
    if kind == "adjoint":
        return AdjointOp(op_from_spec(d["inner"]))
    raise ValueError(f"unknown operator kind {kind!r}")
