"""Dense complex linear algebra with explicit tolerance conventions.

All matrices are numpy arrays of complex128.  Every rank decision in the
package flows through `rank` below, with the tolerance convention: a relative
`tol` is multiplied by the largest singular value, and the default relative
tolerance is max(rows, cols) * machine epsilon.

The module also owns the matrix text format:

    rows cols
    a11 a12 ... a1c
    ...

where each entry is a token "re+imi" (e.g. "1.5-2i", "-0.25+0i").  Writing
uses repr shortest round-trip formatting, so save/load is bit-identical for
finite doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EPS = float(np.finfo(np.float64).eps)

# Two subspace directions closer than this angle cannot be certified distinct
# in double precision once the bases themselves come from computed matrices
# (powers, projectors).  intersect and subspace_sum share this cutoff so the
# dimension identity dim(S1+S2) + dim(S1^S2) = dim S1 + dim S2 holds exactly
# on consistent inputs.
ANGLE_TOL = float(np.sqrt(np.finfo(np.float64).eps))

__all__ = [
    "EPS", "ANGLE_TOL", "as_matrix", "default_tol", "rank", "null_basis",
    "range_basis", "intersect", "subspace_sum", "pinv", "SubspaceBasis",
    "format_complex", "parse_complex", "format_matrix_text",
    "parse_matrix_text", "save_matrix_text", "load_matrix_text",
]


def as_matrix(M) -> np.ndarray:
    """Validate and convert to a 2-D complex128 array with finite entries."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={A.ndim}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def default_tol(shape) -> float:
    return max(shape) * EPS


def _svd(A):
    return np.linalg.svd(A, full_matrices=True)


def rank(M, tol: float | None = None) -> int:
    """Numerical rank: number of singular values above tol * sigma_max."""
    A = as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    rel = default_tol(A.shape) if tol is None else float(tol)
    return int(np.sum(s > rel * s[0]))


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^ambient_dim.

    vectors has shape (ambient_dim, dim); columns are orthonormal within tol.
    """

    ambient_dim: int
    vectors: np.ndarray
    tol: float = field(default=0.0)

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=np.complex128)
        if V.ndim != 2 or V.shape[0] != self.ambient_dim:
            raise ValueError(
                f"basis shape {V.shape} does not match ambient dim {self.ambient_dim}")
        if V.shape[1] > self.ambient_dim:
            raise ValueError("more basis vectors than ambient dimension")
        object.__setattr__(self, "vectors", V)
        check = max(self.tol, 64.0 * self.ambient_dim * EPS)
        if V.shape[1]:
            g = V.conj().T @ V - np.eye(V.shape[1])
            if np.linalg.norm(g) > check:
                raise ValueError("basis columns are not orthonormal")

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def projector(self) -> np.ndarray:
        return self.vectors @ self.vectors.conj().T

    def contains(self, v, tol: float | None = None) -> bool:
        v = np.asarray(v, dtype=np.complex128).reshape(self.ambient_dim)
        nv = np.linalg.norm(v)
        if nv == 0.0:
            return True
        t = self.tol if tol is None else tol
        t = max(t, default_tol((self.ambient_dim, self.ambient_dim)))
        resid = v - self.vectors @ (self.vectors.conj().T @ v)
        return bool(np.linalg.norm(resid) <= t * max(1.0, nv) * 64.0)


def null_basis(M, tol: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the numerical null space of M."""
    A = as_matrix(M)
    rel = default_tol(A.shape) if tol is None else float(tol)
    _, s, vh = _svd(A)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > rel * smax)) if smax > 0.0 else 0
    vecs = vh[r:, :].conj().T
    return SubspaceBasis(A.shape[1], vecs, rel)


def range_basis(M, tol: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the numerical column space of M."""
    A = as_matrix(M)
    rel = default_tol(A.shape) if tol is None else float(tol)
    u, s, _ = _svd(A)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > rel * smax)) if smax > 0.0 else 0
    return SubspaceBasis(A.shape[0], u[:, :r], rel)


def _check_same_ambient(S1: SubspaceBasis, S2: SubspaceBasis):
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {S1.ambient_dim} vs {S2.ambient_dim}")


def intersect(S1: SubspaceBasis, S2: SubspaceBasis,
              tol: float | None = None) -> SubspaceBasis:
    """Intersection of two subspaces.

    Computed as the null space of the stacked projector complements
    [I - P1; I - P2]: v lies in both subspaces iff both rows kill it.
    """
    _check_same_ambient(S1, S2)
    n = S1.ambient_dim
    eye = np.eye(n)
    stacked = np.vstack([eye - S1.projector(), eye - S2.projector()])
    rel = max(S1.tol, S2.tol, ANGLE_TOL) if tol is None else float(tol)
    _, s, vh = _svd(stacked)
    # Singular values of the stacked complements are sin-like functions of the
    # principal angles (scale <= sqrt(2)): intersection directions give zeros,
    # everything else sits at the angle scale.  Threshold absolutely.
    r = int(np.sum(s > rel))
    vecs = vh[r:, :].conj().T
    return SubspaceBasis(n, vecs, rel)


def subspace_sum(S1: SubspaceBasis, S2: SubspaceBasis,
                 tol: float | None = None) -> SubspaceBasis:
    """Smallest subspace containing both (orthonormalized concatenation)."""
    _check_same_ambient(S1, S2)
    n = S1.ambient_dim
    cat = np.hstack([S1.vectors, S2.vectors])
    if cat.shape[1] == 0:
        return SubspaceBasis(n, np.zeros((n, 0)), max(S1.tol, S2.tol))
    # Columns are unit vectors, so small singular values of the concatenation
    # measure angles between the spans; use the shared angle cutoff so the
    # result is consistent with intersect.
    rel = max(S1.tol, S2.tol, ANGLE_TOL) if tol is None else float(tol)
    u, s, _ = _svd(cat)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > rel * smax)) if smax > 0.0 else 0
    return SubspaceBasis(n, u[:, :r], rel)


def pinv(M, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the package rank convention."""
    A = as_matrix(M)
    rel = default_tol(A.shape) if tol is None else float(tol)
    u, s, vh = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=np.complex128)
    keep = s > rel * smax
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv) @ u.conj().T


# ---------------------------------------------------------------------------
# matrix text format


def _format_float(x: float) -> str:
    # repr gives the shortest string that round-trips the double exactly
    return repr(float(x))


def format_complex(z: complex) -> str:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite entry: {z!r}")
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{_format_float(z.real)}{sign}{_format_float(abs(z.imag))}i"


def parse_complex(token: str) -> complex:
    t = token.strip()
    if not t.endswith("i"):
        raise ValueError(f"malformed complex token (missing 'i'): {token!r}")
    body = t[:-1]
    split = -1
    for i in range(len(body) - 1, 0, -1):
        if body[i] in "+-" and body[i - 1] not in "eE":
            split = i
            break
    if split < 0:
        raise ValueError(f"malformed complex token: {token!r}")
    re_part = body[:split]
    im_part = body[split:]
    try:
        re_v = float(re_part)
        im_v = float(im_part[1:])
    except ValueError as exc:
        raise ValueError(f"malformed complex token: {token!r}") from exc
    if im_part[0] == "-":
        im_v = -im_v
    return complex(re_v, im_v)


def format_matrix_text(M) -> str:
    A = as_matrix(M)
    rows, cols = A.shape
    lines = [f"{rows} {cols}"]
    for i in range(rows):
        lines.append(" ".join(format_complex(A[i, j]) for j in range(cols)))
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    lines = text.split("\n")
    head = lines[0].split() if lines else []
    if len(head) != 2:
        raise ValueError("first line must be 'rows cols'")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError("first line must be 'rows cols'") from exc
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    tokens = " ".join(lines[1:]).split()
    if len(tokens) != rows * cols:
        raise ValueError(
            f"expected {rows * cols} entries, found {len(tokens)}")
    flat = np.array([parse_complex(t) for t in tokens], dtype=np.complex128)
    return flat.reshape(rows, cols)


def save_matrix_text(path, M) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_matrix_text(M))


def load_matrix_text(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return parse_matrix_text(fh.read())
