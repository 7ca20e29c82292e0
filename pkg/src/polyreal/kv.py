"""The Kaijser-Varopoulos counterexample package.

Three commuting 5x5 partial isometries T_j = e_{j+1} e_1* + e_5 v_j*,
built from unit vectors v_j supported on coordinates 2..4 with entries
-1/sqrt(3) on the (j+1)-st coordinate and +1/sqrt(3) on the other two,
together with the degree-2 polynomial

    p(z) = (z_1^2 + z_2^2 + z_3^2 - 2 z_1 z_2 - 2 z_1 z_3 - 2 z_2 z_3) / 5.

The sup of |p| over the torus is 1, yet ||p(T)|| = 3 sqrt(3) / 5 > 1.  The
tuple is moreover "tensor-contractive": for any X with the row symbol
sum_k z_k X_k contractive on the polydisk, || sum_k T_k (x) X_k || <= 1.
That follows from three structural facts this module certifies directly:
the sparsity pattern of sum T_k (x) X_k, the norm identity reducing it to
a block column and a block row, and the column bound obtained by averaging
the row condition over the torus.

The outer product convention is a (x) b = a b*, i.e. (a (x) b) x = <x, b> a,
which makes T_j e_1 = e_{j+1} and puts the X_k in the first block column.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .matrixcore import Certificate, as_matrix, is_psd, operator_norm
from .polynomial import (
    MultiPoly,
    OperatorTuple,
    eval_tuple,
    pencil_norm_objective,
    torus_search_max,
)

STRUCTURE_TOL = 1e-12
NORM_IDENTITY_TOL = 1e-10
ROW_SUP_TOL = 1e-8
SIGN_TOL = 1e-10
TENSOR_TOL = 1e-8
COLUMN_TOL = 1e-9

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class KvData:
    """The counterexample bundle: tuple T, polynomial p, unit vectors v."""

    t: OperatorTuple
    p: MultiPoly
    v: tuple


def kv_vectors() -> list[np.ndarray]:
    """The three unit vectors v_1, v_2, v_3 in C^5."""
    return [
        np.array([0.0, -1.0, 1.0, 1.0, 0.0], dtype=complex) / _SQRT3,
        np.array([0.0, 1.0, -1.0, 1.0, 0.0], dtype=complex) / _SQRT3,
        np.array([0.0, 1.0, 1.0, -1.0, 0.0], dtype=complex) / _SQRT3,
    ]


def kv_matrices(v) -> list[np.ndarray]:
    """T_j = e_{j+1} e_1* + e_5 v_j* for any triple of vectors in C^5."""
    e = np.eye(5, dtype=complex)
    return [np.outer(e[j + 1], e[0].conj()) + np.outer(e[4], np.conj(v[j])) for j in range(3)]


def kv_polynomial() -> MultiPoly:
    """(z1^2 + z2^2 + z3^2 - 2 z1 z2 - 2 z1 z3 - 2 z2 z3) / 5."""
    return MultiPoly(
        3,
        {
            (2, 0, 0): 0.2,
            (0, 2, 0): 0.2,
            (0, 0, 2): 0.2,
            (1, 1, 0): -0.4,
            (1, 0, 1): -0.4,
            (0, 1, 1): -0.4,
        },
    )


def build_kv() -> KvData:
    """Construct the counterexample data exactly."""
    v = kv_vectors()
    return KvData(t=OperatorTuple(kv_matrices(v)), p=kv_polynomial(), v=tuple(v))


def _y_triple(x):
    """The last-row blocks: Y_j are the +/- combinations of the X_k over sqrt(3)."""
    x0, x1, x2 = x
    return [
        (-x0 + x1 + x2) / _SQRT3,
        (x0 - x1 + x2) / _SQRT3,
        (x0 + x1 - x2) / _SQRT3,
    ]


def _check_x_triple(x):
    mats = [as_matrix(m) for m in x]
    if len(mats) != 3:
        raise DimensionError(f"expected 3 matrices, got {len(mats)}")
    shape = mats[0].shape
    for i, m in enumerate(mats):
        if m.shape != shape:
            raise DimensionError(f"matrix {i} has shape {m.shape}, expected {shape}")
    return mats


def structure_certificate(t_mats, x) -> Certificate:
    """Raw-matrix core of verify_structure (works on any 5x5 triple)."""
    mats = _check_x_triple(x)
    rows, cols = mats[0].shape
    total = sum(np.kron(t_mats[k], mats[k]) for k in range(3))
    expected = np.zeros((5 * rows, 5 * cols), dtype=complex)
    for k in range(3):
        expected[(k + 1) * rows:(k + 2) * rows, 0:cols] = mats[k]
    for k, y in enumerate(_y_triple(mats)):
        expected[4 * rows:5 * rows, (k + 1) * cols:(k + 2) * cols] = y
    dev = float(np.max(np.abs(total - expected))) if total.size else 0.0
    passed = dev <= STRUCTURE_TOL
    witness = None
    if not passed:
        i, j = np.unravel_index(int(np.argmax(np.abs(total - expected))), total.shape)
        witness = {"entry": (int(i), int(j)), "got": total[i, j], "expected": expected[i, j]}
    return Certificate(
        passed=passed,
        margin=dev,
        tolerance=STRUCTURE_TOL,
        description=(
            "deviation of sum T_k (x) X_k from the first-column/last-row "
            f"pattern = {dev:.3e}"
        ),
        witness=witness,
    )


def verify_structure(kv: KvData, x) -> Certificate:
    """Does sum T_k (x) X_k have exactly the predicted block pattern?

    First block column carries X_1, X_2, X_3; last block row carries the
    sign combinations Y_1, Y_2, Y_3 over sqrt(3); everything else is zero.
    margin = largest entry deviation, pass iff <= 1e-12.
    """
    return structure_certificate(kv.t.mats, x)


def norm_identity_certificate(t_mats, x) -> Certificate:
    """Raw-matrix core of block_norm_identity."""
    mats = _check_x_triple(x)
    total = sum(np.kron(t_mats[k], mats[k]) for k in range(3))
    lhs = operator_norm(total)
    col = math.sqrt(operator_norm(sum(m.conj().T @ m for m in mats)))
    ys = _y_triple(mats)
    row = math.sqrt(operator_norm(sum(y @ y.conj().T for y in ys)))
    dev = abs(lhs - max(col, row))
    passed = dev <= NORM_IDENTITY_TOL
    return Certificate(
        passed=passed,
        margin=dev,
        tolerance=NORM_IDENTITY_TOL,
        description=(
            f"| ||sum T_k (x) X_k|| - max(column, row) | = {dev:.3e} "
            f"(norm {lhs:.12g}, column {col:.12g}, row {row:.12g})"
        ),
        witness=None if passed else {"norm": lhs, "column": col, "row": row},
    )


def block_norm_identity(kv: KvData, x) -> Certificate:
    """||sum T_k (x) X_k|| equals max(first-column norm, last-row norm).

    The column part is sqrt(||sum X_k* X_k||); the row part is
    sqrt(||sum Y_k Y_k*||).  The two pieces have orthogonal ranges and
    cokernels, so the maximum is exact.  margin = deviation, pass iff
    <= 1e-10.
    """
    return norm_identity_certificate(kv.t.mats, x)


def row_condition(x, grid_per_axis: int = 64, refine_steps: int = 200) -> Certificate:
    """Is the row symbol sum_k zeta_k X_k contractive?

    Two sampled ingredients: the torus sup estimate must stay <= 1 + 1e-8
    and every one of the eight sign combinations || +-X_1 +-X_2 +-X_3 ||
    must stay <= 1 + 1e-10.  margin = worst excess over 1.
    """
    mats = _check_x_triple(x)
    sup, zeta = torus_search_max(
        pencil_norm_objective(mats), 3, grid_per_axis, refine_steps
    )
    sign_worst = -math.inf
    sign_witness = None
    for signs in itertools.product((1.0, -1.0), repeat=3):
        val = operator_norm(sum(sg * m for sg, m in zip(signs, mats)))
        if val > sign_worst:
            sign_worst, sign_witness = val, signs
    sup_ok = sup <= 1.0 + ROW_SUP_TOL
    sign_ok = sign_worst <= 1.0 + SIGN_TOL
    passed = sup_ok and sign_ok
    witness = None
    if not passed:
        witness = {"zeta": zeta, "sup": sup} if not sup_ok else {"signs": sign_witness, "norm": sign_worst}
    return Certificate(
        passed=passed,
        margin=max(sup - 1.0, sign_worst - 1.0),
        tolerance=ROW_SUP_TOL,
        description=(
            f"torus sup margin {sup - 1.0:.3e} (tol {ROW_SUP_TOL:g}), "
            f"sign-combination margin {sign_worst - 1.0:.3e} (tol {SIGN_TOL:g})"
        ),
        witness=witness,
    )


def column_condition(x, avg_samples: int = 2000, seed: int = 0) -> Certificate:
    """Is I - sum X_k* X_k positive semidefinite?

    This is the first-block-column contraction.  The certificate also
    reports (without asserting) how fast the torus average of
    I - (sum zeta_k X_k)* (sum zeta_k X_k) converges to the same matrix,
    which is the averaging route from the row condition.
    """
    mats = _check_x_triple(x)
    d = mats[0].shape[1]
    gram = np.eye(d, dtype=complex) - sum(m.conj().T @ m for m in mats)
    base = is_psd(gram, COLUMN_TOL)
    rng = np.random.default_rng(seed)
    acc = np.zeros((d, d), dtype=complex)
    for _ in range(avg_samples):
        zeta = np.exp(2j * np.pi * rng.random(3))
        mz = sum(z * m for z, m in zip(zeta, mats))
        acc += mz.conj().T @ mz
    emp = np.eye(d, dtype=complex) - acc / avg_samples
    avg_err = operator_norm(emp - gram)
    scale = max(operator_norm(sum(m.conj().T @ m for m in mats)), 1.0)
    note = (
        f"; torus-averaging check: |mean over {avg_samples} samples - exact| = "
        f"{avg_err:.2e}, O(N^-1/2) scale ~ {scale / math.sqrt(avg_samples):.2e} (reported only)"
    )
    return Certificate(
        passed=base.passed,
        margin=base.margin,
        tolerance=base.tolerance,
        description=base.description + note,
        witness=base.witness,
    )


def tensor_contractivity(
    kv: KvData,
    x,
    grid_per_axis: int = 64,
    refine_steps: int = 200,
    row_cert: Certificate | None = None,
) -> Certificate:
    """||sum T_k (x) X_k|| <= 1 + 1e-8 for admissible X.

    Requires the row condition to hold; pass ``row_cert`` to reuse a
    certificate already computed for the same triple.  margin = norm - 1.
    """
    mats = _check_x_triple(x)
    if row_cert is None:
        row_cert = row_condition(mats, grid_per_axis, refine_steps)
    if not row_cert.passed:
        raise ValueError(
            "tensor_contractivity requires an admissible triple: run row_condition(x) "
            "first and only test triples that pass"
        )
    total = sum(np.kron(kv.t.mats[k], mats[k]) for k in range(3))
    val = operator_norm(total)
    passed = val <= 1.0 + TENSOR_TOL
    witness = None
    if not passed:
        _, _, vh = np.linalg.svd(total)
        witness = {"norm": val, "maximizer": vh[0].conj()}
    return Certificate(
        passed=passed,
        margin=val - 1.0,
        tolerance=TENSOR_TOL,
        description=f"||sum T_k (x) X_k|| = {val:.12g} for an admissible triple",
        witness=witness,
    )


def violation_norm(kv: KvData) -> float:
    """||p(T)|| for the counterexample: 3 sqrt(3) / 5, about 1.0392."""
    return operator_norm(eval_tuple(kv.p, kv.t))
