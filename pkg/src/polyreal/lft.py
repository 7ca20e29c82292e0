"""Linear fractional machinery.

The block map [[W, X], [Y, Z]] -> Z + Y (I - W)^{-1} X is contractive
whenever the block matrix is a strict contraction.  Substituting a
commuting tuple into a system's block symbol (r T . G) and taking this LFT
reproduces the polynomial evaluated at the scaled tuple whenever the
system realizes the polynomial; `verify_lft_equals_eval` certifies that
identity numerically.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .matrixcore import Certificate, as_matrix, block_assemble, operator_norm, resolvent_apply
from .polynomial import MultiPoly, OperatorTuple, eval_tuple
from .scattering import ScatteringSystem


def lft(f, split) -> np.ndarray:
    """Lower linear fractional transform Z + Y (I - W)^{-1} X.

    ``split`` = (state_rows, state_cols) locates the W block, which must be
    square.  Contractivity of the result is guaranteed when ||f|| < 1; the
    operation itself only needs I - W invertible.
    """
    f = as_matrix(f, allow_empty=True)
    rows, cols = split
    if rows != cols:
        raise DimensionError(f"W block must be square; split was {split}")
    if not (0 <= rows <= f.shape[0] and 0 <= cols <= f.shape[1]):
        raise DimensionError(f"split {split} exceeds matrix shape {f.shape}")
    w = f[:rows, :cols]
    x = f[:rows, cols:]
    y = f[rows:, :cols]
    z = f[rows:, cols:]
    return z + y @ resolvent_apply(w, x)


def _tensor_block(t: OperatorTuple, mats, r: float) -> np.ndarray:
    """sum_k r T_k (x) M_k (np.kron handles zero-dimensional blocks)."""
    pieces = [r * np.kron(t.mats[k], np.asarray(mats[k], dtype=complex)) for k in range(t.n)]
    out = pieces[0]
    for piece in pieces[1:]:
        out = out + piece
    return out


def tensor_system(t: OperatorTuple, s: ScatteringSystem, r: float) -> np.ndarray:
    """The block operator r T . G assembled from r T . A, r T . B, etc.

    r = 1 degenerates to the scalar block symbol when the tuple consists of
    1x1 matrices; the contractivity guarantees downstream need r < 1.
    """
    if t.n != s.n:
        raise DimensionError(f"tuple has n={t.n}, system has n={s.n}")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    return block_assemble(
        [
            [_tensor_block(t, s.A, r), _tensor_block(t, s.B, r)],
            [_tensor_block(t, s.C, r), _tensor_block(t, s.D, r)],
        ]
    )


def poly_at_tuple_via_lft(t: OperatorTuple, s: ScatteringSystem, r: float) -> np.ndarray:
    """LFT of the tensor substitution: rT.D + rT.C (I - rT.A)^{-1} rT.B."""
    if t.n != s.n:
        raise DimensionError(f"tuple has n={t.n}, system has n={s.n}")
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    ta = _tensor_block(t, s.A, r)
    tb = _tensor_block(t, s.B, r)
    tc = _tensor_block(t, s.C, r)
    td = _tensor_block(t, s.D, r)
    return td + tc @ resolvent_apply(ta, tb)


def verify_lft_equals_eval(
    t: OperatorTuple,
    s: ScatteringSystem,
    p: MultiPoly,
    r: float,
    tol: float = 1e-8,
) -> Certificate:
    """Certify that the tensor LFT agrees with direct evaluation of p at rT.

    Callers must have verified that s realizes p (check_realizes) and that
    I - rT.A is invertible.  margin = || LFT - p(rT) ||; pass iff <= tol.
    """
    lhs = poly_at_tuple_via_lft(t, s, r)
    rhs = eval_tuple(p, t.scaled(r))
    margin = operator_norm(lhs - rhs) if lhs.size else 0.0
    passed = margin <= tol
    witness = None
    if not passed:
        flat = np.abs(lhs - rhs)
        i, j = np.unravel_index(int(np.argmax(flat)), flat.shape)
        witness = {"entry": (int(i), int(j)), "lft": lhs[i, j], "eval": rhs[i, j]}
    return Certificate(
        passed=passed,
        margin=margin,
        tolerance=tol,
        description=f"||LFT(rT.G) - p(rT)|| = {margin:.3e} at r = {r}",
        witness=witness,
    )
