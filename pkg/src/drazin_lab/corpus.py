"""Seeded corpus of matrices with known core/nil structure.

Each sample is A = S (C (+) N) S^{-1} where C is a well-conditioned
invertible core (singular values log-uniform in [0.7, 1.5], so eigenvalue
moduli stay in that band), N is a direct sum of strictly upper triangular
blocks with nonvanishing superdiagonals (nilpotency order = largest block),
and S has condition number log-uniform in [1, cond_max].  Ground truth:
index = order of N (0 when there is no nil part), core_dim = size of C.

All randomness flows through numpy's default_rng (PCG64), so a seed pins
the corpus bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import format_matrix_text

__all__ = ["GeneratedMatrix", "generate_matrix", "generate_corpus", "write_corpus"]


@dataclass(frozen=True)
class GeneratedMatrix:
    matrix: np.ndarray
    index: int
    core_dim: int
    nil_blocks: tuple[int, ...] = field(default=())
    cond_s: float = 1.0

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def metadata(self) -> dict:
        return {
            "n": self.n,
            "index": self.index,
            "core_dim": self.core_dim,
            "nil_blocks": list(self.nil_blocks),
            "cond_s": self.cond_s,
        }


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_core(rng: np.random.Generator, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    sig = np.exp(rng.uniform(np.log(0.7), np.log(1.5), size=r))
    return _haar_unitary(rng, r) @ np.diag(sig) @ _haar_unitary(rng, r)


def _random_nil_block(rng: np.random.Generator, b: int) -> np.ndarray:
    N = np.zeros((b, b), dtype=np.complex128)
    for i in range(b - 1):
        phase = np.exp(2j * np.pi * rng.uniform())
        N[i, i + 1] = rng.uniform(0.5, 1.5) * phase
        for j in range(i + 2, b):
            N[i, j] = 0.5 * (rng.standard_normal() + 1j * rng.standard_normal())
    return N


def _partition(rng: np.random.Generator, m: int, max_block: int) -> list[int]:
    blocks = []
    while m > 0:
        b = int(rng.integers(1, min(m, max_block) + 1))
        blocks.append(b)
        m -= b
    return blocks


def generate_matrix(rng: np.random.Generator, n_range=(2, 12),
                    max_nil_block: int = 3, cond_max: float = 100.0,
                    p_invertible: float = 0.15,
                    p_nilpotent: float = 0.10) -> GeneratedMatrix:
    """Draw one structured sample; see the module docstring for the recipe."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    u = rng.uniform()
    if u < p_invertible:
        core = n
    elif u < p_invertible + p_nilpotent:
        core = 0
    else:
        core = int(rng.integers(1, n))
    nil_blocks = _partition(rng, n - core, max_nil_block)

    parts = [_random_core(rng, core)] + [_random_nil_block(rng, b) for b in nil_blocks]
    B = np.zeros((n, n), dtype=np.complex128)
    at = 0
    for part in parts:
        b = part.shape[0]
        B[at:at + b, at:at + b] = part
        at += b

    cond = float(np.exp(rng.uniform(0.0, np.log(cond_max))))
    sig = np.exp(rng.uniform(np.log(1.0 / cond), 0.0, size=n))
    sig[0] = 1.0
    if n > 1:
        sig[1] = 1.0 / cond
    S = _haar_unitary(rng, n) @ np.diag(sig) @ _haar_unitary(rng, n)
    A = S @ B @ np.linalg.solve(S, np.eye(n, dtype=np.complex128))

    index = max(nil_blocks) if nil_blocks else 0
    return GeneratedMatrix(matrix=A, index=index, core_dim=core,
                           nil_blocks=tuple(nil_blocks), cond_s=cond)


def generate_corpus(seed: int, count: int, **kwargs) -> list[GeneratedMatrix]:
    rng = np.random.default_rng(seed)
    return [generate_matrix(rng, **kwargs) for _ in range(count)]


def write_corpus(out_dir, seed: int, count: int, **kwargs) -> list[str]:
    """Write matrix_NNNN.txt plus a JSON metadata sidecar per sample.

    Regeneration with the same seed and count is byte-identical.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    samples = generate_corpus(seed, count, **kwargs)
    written = []
    for i, sample in enumerate(samples):
        stem = f"matrix_{i:04d}"
        mpath = os.path.join(out_dir, stem + ".txt")
        jpath = os.path.join(out_dir, stem + ".json")
        _atomic_write(mpath, format_matrix_text(sample.matrix))
        meta = dict(sample.metadata(), seed=seed, position=i)
        _atomic_write(jpath, json.dumps(meta, sort_keys=True, indent=2) + "\n")
        written.extend([mpath, jpath])
    return written


def _atomic_write(path: str, text: str) -> None:
    import os

    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)
