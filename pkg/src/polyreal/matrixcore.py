"""Dense complex linear algebra primitives used by every other module.

Matrices are plain 2-D complex numpy arrays.  Everything here is a pure
function of its inputs, so concurrent callers need no locking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DimensionError, SingularityError

#: Default certificate tolerance: two orders above accumulated rounding at
#: desk scale, far below the margins the checks are meant to resolve.
DEFAULT_TOL = 1e-9

_COND_LIMIT = 1e13
_RESIDUAL_REL = 1e-10


def as_matrix(m, allow_empty: bool = False) -> np.ndarray:
    """Coerce input to a 2-D complex array, checking shape and finiteness."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.size == 0 and not allow_empty:
        raise DimensionError(f"matrix is empty (shape {a.shape})")
    if a.size and not np.isfinite(a).all():
        raise ValueError("matrix contains non-finite entries")
    return a


def _serialize(obj):
    """Make a witness JSON-friendly; complex values become [re, im] pairs."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return _serialize(obj.item())
    if isinstance(obj, np.ndarray):
        return [_serialize(x) for x in obj]
    if isinstance(obj, (list, tuple)):
        return [_serialize(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _serialize(v) for k, v in obj.items()}
    return repr(obj)


@dataclass(frozen=True)
class Certificate:
    """Structured verdict of a numerical check.

    ``margin`` is the check's signed distance to its own threshold; each
    operation documents its sign convention in its docstring and in
    ``description``.  A failing certificate always carries a witness
    exhibiting the extreme value.
    """

    passed: bool
    margin: float
    tolerance: float
    description: str
    witness: Any = None

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing certificate requires a witness")
        object.__setattr__(self, "margin", float(self.margin))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "description": self.description,
            "witness": _serialize(self.witness),
        }


def operator_norm(m) -> float:
    """Largest singular value of ``m``, via a full SVD."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False)[0])


def batch_operator_norms(stack) -> np.ndarray:
    """Spectral norm of every matrix in an (m, rows, cols) stack."""
    a = np.asarray(stack, dtype=complex)
    if a.ndim != 3:
        raise DimensionError(f"expected a stack of matrices, got ndim={a.ndim}")
    if a.shape[1] == 0 or a.shape[2] == 0:
        return np.zeros(a.shape[0])
    return np.linalg.svd(a, compute_uv=False)[:, 0]


def kron(a, b) -> np.ndarray:
    """Kronecker product a (x) b."""
    return np.kron(as_matrix(a), as_matrix(b))


def block_assemble(blocks) -> np.ndarray:
    """Concatenate a rectangular grid of blocks into one dense matrix.

    Every block in a grid row must share its row count and every block in a
    grid column its column count; violations report the offending indices.
    """
    grid = [[as_matrix(b, allow_empty=True) for b in row] for row in blocks]
    if not grid or not grid[0]:
        raise DimensionError("block grid is empty")
    ncols = len(grid[0])
    for i, row in enumerate(grid):
        if len(row) != ncols:
            raise DimensionError(f"grid row {i} has {len(row)} blocks, expected {ncols}")
    heights = [row[0].shape[0] for row in grid]
    widths = [b.shape[1] for b in grid[0]]
    for i, row in enumerate(grid):
        for j, b in enumerate(row):
            if b.shape != (heights[i], widths[j]):
                raise DimensionError(
                    f"block ({i}, {j}) has shape {b.shape}, expected ({heights[i]}, {widths[j]})"
                )
    out = np.zeros((sum(heights), sum(widths)), dtype=complex)
    r0 = 0
    for i, row in enumerate(grid):
        c0 = 0
        for j, b in enumerate(row):
            out[r0:r0 + heights[i], c0:c0 + widths[j]] = b
            c0 += widths[j]
        r0 += heights[i]
    return out


def resolvent_apply(w, rhs) -> np.ndarray:
    """Return (I - w)^{-1} rhs by a direct linear solve.

    Callers are expected to keep ||w|| < 1 so that I - w is invertible; the
    solve itself only demands a usable condition number and verifies the
    residual ||(I - w) x - rhs|| <= 1e-10 ||rhs||.
    """
    w = as_matrix(w, allow_empty=True)
    rhs = as_matrix(rhs, allow_empty=True)
    if w.shape[0] != w.shape[1]:
        raise DimensionError(f"w must be square, got shape {w.shape}")
    if rhs.shape[0] != w.shape[0]:
        raise DimensionError(f"rhs has {rhs.shape[0]} rows, expected {w.shape[0]}")
    if w.shape[0] == 0:
        return rhs.copy()
    m = np.eye(w.shape[0], dtype=complex) - w
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularityError(
            f"I - w is numerically singular (cond ~ {cond:.3e}, norm(w) = {operator_norm(w):.6g})"
        )
    x = np.linalg.solve(m, rhs)
    if rhs.size:
        rhs_norm = operator_norm(rhs)
        residual = float(np.linalg.norm(m @ x - rhs, 2))
        if rhs_norm > 0 and residual > _RESIDUAL_REL * rhs_norm:
            raise SingularityError(
                f"resolvent solve residual {residual:.3e} exceeds {_RESIDUAL_REL:g} * ||rhs||"
                f" (norm(w) = {operator_norm(w):.6g})"
            )
    return x


def is_psd(m, tol: float = DEFAULT_TOL) -> Certificate:
    """Certify positive semidefiniteness of a (nearly) Hermitian matrix.

    The matrix is symmetrized before the eigendecomposition; inputs further
    than ``tol`` from Hermitian are rejected.  margin = smallest eigenvalue,
    pass iff margin >= -tol; the witness on failure is the corresponding
    eigenvector.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {a.shape}")
    herm_dev = operator_norm(a - a.conj().T)
    if herm_dev > tol:
        raise ValueError(
            f"matrix is not Hermitian within tolerance (deviation {herm_dev:.3e} > {tol:.3e})"
        )
    h = (a + a.conj().T) / 2.0
    evals, evecs = np.linalg.eigh(h)
    margin = float(evals[0])
    passed = margin >= -tol
    return Certificate(
        passed=passed,
        margin=margin,
        tolerance=tol,
        description=f"smallest eigenvalue of symmetrized matrix = {margin:.6e}",
        witness=None if passed else evecs[:, 0],
    )
