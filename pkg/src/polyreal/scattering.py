"""Dissipative nD scattering systems and their transfer functions.

A system is the tuple (n; A, B, C, D) of operator n-tuples acting between
finite-dimensional state, input, and output spaces.  Dissipativity (the
block symbol contractive at every torus point) is deliberately *not* an
invariant of the type: candidate systems under refutation are expected to
violate it, so it is checked separately and reported as a Certificate.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DimensionError, FormatError
from .matrixcore import (
    DEFAULT_TOL,
    Certificate,
    as_matrix,
    block_assemble,
    resolvent_apply,
)
from .polynomial import MultiPoly, OperatorTuple, pencil_norm_objective, torus_search_max


class ScatteringSystem:
    """State-space data (n; A, B, C, D) with consistent finite dimensions.

    A, B, C, D are sequences of n matrices shaped (state, state),
    (state, in), (out, state), (out, in).  The state space may be
    zero-dimensional (pure feedthrough).
    """

    def __init__(self, A, B, C, D):
        A = tuple(as_matrix(m, allow_empty=True) for m in A)
        B = tuple(as_matrix(m, allow_empty=True) for m in B)
        C = tuple(as_matrix(m, allow_empty=True) for m in C)
        D = tuple(as_matrix(m, allow_empty=True) for m in D)
        n = len(A)
        if n < 1:
            raise DimensionError("a system needs n >= 1")
        if not (len(B) == len(C) == len(D) == n):
            raise DimensionError(
                f"A, B, C, D must all have length n={n}; got {len(B)}, {len(C)}, {len(D)}"
            )
        state = A[0].shape[0]
        out_dim, in_dim = D[0].shape
        for k in range(n):
            if A[k].shape != (state, state):
                raise DimensionError(f"A[{k}] has shape {A[k].shape}, expected ({state}, {state})")
            if B[k].shape != (state, in_dim):
                raise DimensionError(f"B[{k}] has shape {B[k].shape}, expected ({state}, {in_dim})")
            if C[k].shape != (out_dim, state):
                raise DimensionError(f"C[{k}] has shape {C[k].shape}, expected ({out_dim}, {state})")
            if D[k].shape != (out_dim, in_dim):
                raise DimensionError(f"D[{k}] has shape {D[k].shape}, expected ({out_dim}, {in_dim})")
        if in_dim < 1 or out_dim < 1:
            raise DimensionError("input and output spaces must be at least one-dimensional")
        self.A, self.B, self.C, self.D = A, B, C, D
        self.n = n
        self.state_dim = state
        self.in_dim = in_dim
        self.out_dim = out_dim

    def __repr__(self):
        return (
            f"ScatteringSystem(n={self.n}, state_dim={self.state_dim}, "
            f"in_dim={self.in_dim}, out_dim={self.out_dim})"
        )


def gblock(s: ScatteringSystem, k: int) -> np.ndarray:
    """The k-th block symbol generator [[A_k, B_k], [C_k, D_k]] (0-based k)."""
    if not 0 <= k < s.n:
        raise DimensionError(f"index {k} out of range for n={s.n}")
    return block_assemble([[s.A[k], s.B[k]], [s.C[k], s.D[k]]])


def zeta_g(s: ScatteringSystem, zeta) -> np.ndarray:
    """The block symbol sum_k zeta_k G_k at a point zeta."""
    zeta = np.asarray(zeta, dtype=complex).reshape(-1)
    if zeta.shape[0] != s.n:
        raise DimensionError(f"zeta has {zeta.shape[0]} coordinates, expected {s.n}")
    out = np.zeros((s.state_dim + s.out_dim, s.state_dim + s.in_dim), dtype=complex)
    for k in range(s.n):
        out += zeta[k] * gblock(s, k)
    return out


def check_dissipative(
    s: ScatteringSystem,
    grid_per_axis: int = 64,
    refine_steps: int = 200,
    tol: float = DEFAULT_TOL,
) -> Certificate:
    """Sampled contractivity check of the block symbol on the torus.

    margin = (largest sampled ||zeta G||) - 1; pass iff margin <= tol.  A
    failure, with its witness point, is rigorous; a pass is evidence only up
    to the grid/ascent resolution, which the certificate records.
    """
    if grid_per_axis < 4:
        raise ValueError("grid_per_axis must be at least 4")
    objective = pencil_norm_objective([gblock(s, k) for k in range(s.n)])
    found, zeta = torus_search_max(objective, s.n, grid_per_axis, refine_steps)
    margin = found - 1.0
    return Certificate(
        passed=found <= 1.0 + tol,
        margin=margin,
        tolerance=tol,
        description=(
            f"max sampled ||zeta G|| = {found:.12g} over grid {grid_per_axis}^{s.n} "
            f"with {refine_steps} ascent passes; a fail is rigorous, a pass is "
            "evidence at this resolution"
        ),
        witness=zeta,
    )


def transfer_eval(s: ScatteringSystem, z) -> np.ndarray:
    """Transfer function zD + zC (I - zA)^{-1} zB at a point of the open polydisk.

    Points with any |z_k| >= 1 are refused.  For non-dissipative candidates
    the resolvent may be singular inside the polydisk; that surfaces as a
    SingularityError reporting ||zA||.
    """
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != s.n:
        raise DimensionError(f"z has {z.shape[0]} coordinates, expected {s.n}")
    if np.any(np.abs(z) >= 1.0):
        raise ValueError(f"z must lie strictly inside the open polydisk; got |z| = {np.abs(z)}")
    zA = sum(z[k] * s.A[k] for k in range(s.n))
    zB = sum(z[k] * s.B[k] for k in range(s.n))
    zC = sum(z[k] * s.C[k] for k in range(s.n))
    zD = sum(z[k] * s.D[k] for k in range(s.n))
    return zD + zC @ resolvent_apply(zA, zB)


def transfer_taylor(s: ScatteringSystem, max_degree: int):
    """Taylor coefficients of the transfer function up to total degree.

    Expands the word series: degree-1 coefficients are the D_k, and the
    degree-(m+2) coefficient of a monomial aggregates C A ... A B over all
    words with that exponent pattern.  Words sharing a prefix are combined
    layer by layer, which evaluates the same sums at polynomial cost.

    Returns a list of lists of MultiPoly, one per (output, input) entry.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    n = s.n

    def bump(alpha, k):
        out = list(alpha)
        out[k] += 1
        return tuple(out)

    zero_alpha = (0,) * n
    coeff: dict = {}
    for k in range(n):
        key = bump(zero_alpha, k)
        coeff[key] = coeff.get(key, 0) + s.D[k]
    # layer holds the degree-m coefficients of (zA)^(m-1) zB, m starting at 1
    layer = {}
    for k in range(n):
        key = bump(zero_alpha, k)
        layer[key] = layer.get(key, 0) + s.B[k]
    for _deg in range(2, max_degree + 1):
        nxt: dict = {}
        for alpha, mat in layer.items():
            for k in range(n):
                key = bump(alpha, k)
                coeff[key] = coeff.get(key, 0) + s.C[k] @ mat
                nxt[key] = nxt.get(key, 0) + s.A[k] @ mat
        layer = nxt
    polys = []
    for i in range(s.out_dim):
        row = []
        for j in range(s.in_dim):
            row.append(MultiPoly(n, {a: m[i, j] for a, m in coeff.items() if m[i, j] != 0}))
        polys.append(row)
    return polys


def check_realizes(s: ScatteringSystem, p: MultiPoly, tol: float = DEFAULT_TOL) -> Certificate:
    """Do the system's Taylor coefficients match p through degree deg(p)+2?

    Scalar systems only.  margin = largest coefficient discrepancy over the
    union of monomials (absent ones count as zero); pass iff margin <= tol.
    """
    if s.in_dim != 1 or s.out_dim != 1:
        raise ValueError("check_realizes applies to scalar systems (in_dim = out_dim = 1)")
    if p.terms.get((0,) * p.n):
        raise ValueError("transfer functions vanish at the origin; p has a constant term")
    if s.n != p.n:
        worst = max((abs(c) for c in p.terms.values()), default=0.0)
        return Certificate(
            passed=False,
            margin=worst,
            tolerance=tol,
            description=f"variable count mismatch: system has n={s.n}, polynomial has n={p.n}",
            witness={"system_n": s.n, "poly_n": p.n},
        )
    theta = transfer_taylor(s, p.degree() + 2)[0][0]
    worst = 0.0
    worst_alpha = None
    for alpha in set(theta.terms) | set(p.terms):
        dev = abs(theta.terms.get(alpha, 0j) - p.terms.get(alpha, 0j))
        if dev > worst:
            worst, worst_alpha = dev, alpha
    passed = worst <= tol
    return Certificate(
        passed=passed,
        margin=worst,
        tolerance=tol,
        description=(
            f"largest Taylor coefficient discrepancy through degree {p.degree() + 2} "
            f"is {worst:.3e}" + (f" at monomial {worst_alpha}" if worst_alpha else "")
        ),
        witness=None if passed else {"monomial": worst_alpha, "discrepancy": worst},
    )


# ---------------------------------------------------------------------------
# file format


def _matrix_to_json(m: np.ndarray):
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def _matrix_from_json(obj, rows: int, cols: int, where: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise FormatError(f"{where}: expected a list of rows")
    if len(obj) != rows:
        raise FormatError(f"{where}: has {len(obj)} rows, expected {rows}")
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise FormatError(f"{where} row {i}: has {got} entries, expected {cols}")
        for j, entry in enumerate(row):
            if (
                not isinstance(entry, (list, tuple))
                or len(entry) != 2
                or not all(isinstance(v, (int, float)) for v in entry)
            ):
                raise FormatError(f"{where} row {i} col {j}: entry must be an [re, im] pair")
            out[i, j] = complex(entry[0], entry[1])
    return out


def system_to_dict(s: ScatteringSystem) -> dict:
    return {
        "n": s.n,
        "state_dim": s.state_dim,
        "in_dim": s.in_dim,
        "out_dim": s.out_dim,
        "A": [_matrix_to_json(m) for m in s.A],
        "B": [_matrix_to_json(m) for m in s.B],
        "C": [_matrix_to_json(m) for m in s.C],
        "D": [_matrix_to_json(m) for m in s.D],
    }


def system_from_dict(doc: dict) -> ScatteringSystem:
    """Build a system from the JSON document format, validating dimensions
    with precise positions in the error messages."""
    if not isinstance(doc, dict):
        raise FormatError("system document must be a JSON object")
    for field in ("n", "state_dim", "in_dim", "out_dim"):
        if field not in doc:
            raise FormatError(f"missing field {field!r}")
        if not isinstance(doc[field], int) or doc[field] < 0:
            raise FormatError(f"field {field!r} must be a nonnegative integer")
    n = doc["n"]
    state, in_dim, out_dim = doc["state_dim"], doc["in_dim"], doc["out_dim"]
    if n < 1:
        raise FormatError("field 'n' must be at least 1")
    shapes = {"A": (state, state), "B": (state, in_dim), "C": (out_dim, state), "D": (out_dim, in_dim)}
    mats = {}
    for name, (r, c) in shapes.items():
        arr = doc.get(name)
        if not isinstance(arr, list) or len(arr) != n:
            got = len(arr) if isinstance(arr, list) else "missing"
            raise FormatError(f"field {name!r} must be a list of {n} matrices (got {got})")
        mats[name] = [_matrix_from_json(m, r, c, f"{name}[{k}]") for k, m in enumerate(arr)]
    return ScatteringSystem(mats["A"], mats["B"], mats["C"], mats["D"])


def load_system(path) -> ScatteringSystem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read system file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return system_from_dict(doc)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def load_tuple(path) -> OperatorTuple:
    """Load a commuting tuple from JSON {"n": ..., "mats": [matrix, ...]}.

    Matrices use the same row-of-[re, im]-entries encoding as system files
    and must be square of a common dimension.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read tuple file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("mats"), list) or not doc["mats"]:
        raise FormatError(f"{path}: expected an object with a nonempty 'mats' list")
    mats_doc = doc["mats"]
    if "n" in doc and doc["n"] != len(mats_doc):
        raise FormatError(f"{path}: field 'n' is {doc['n']} but 'mats' has {len(mats_doc)} matrices")
    first = mats_doc[0]
    if not isinstance(first, list) or not first:
        raise FormatError(f"{path}: mats[0] must be a nonempty list of rows")
    dim = len(first)
    try:
        mats = [_matrix_from_json(m, dim, dim, f"mats[{k}]") for k, m in enumerate(mats_doc)]
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return OperatorTuple(mats)
