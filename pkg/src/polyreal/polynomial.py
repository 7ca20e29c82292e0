"""Multivariate polynomials in commuting variables and torus sup-norms.

Polynomials are sparse maps from exponent multi-indices to complex
coefficients.  They evaluate at scalar points and at commuting matrix
tuples.  Sup-norms over the unit torus are *searched*, not certified: a
phase grid locates the basin and coordinate-wise golden-section ascent
polishes it, which yields a guaranteed lower bound.  The honest certified
upper bound is the coefficient-sum inequality, so `torus_sup` reports the
interval rather than a point estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import CommutativityError, DimensionError, FormatError
from .matrixcore import as_matrix

#: Commutativity gate applied when an OperatorTuple is constructed.
COMMUTATIVITY_TOL = 1e-10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_CHUNK = 8192
_MAX_GRID_POINTS = 20_000_000


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial in ``n`` commuting variables, keyed by exponent tuples.

    Zero coefficients are never stored; every key has length ``n``.
    """

    n: int
    terms: dict

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean = {}
        for alpha, c in self.terms.items():
            key = tuple(int(a) for a in alpha)
            if len(key) != self.n:
                raise DimensionError(f"exponent {key} has length {len(key)}, expected {self.n}")
            if any(a < 0 for a in key):
                raise ValueError(f"negative exponent in {key}")
            c = complex(c)
            if c != 0:
                clean[key] = c
        object.__setattr__(self, "terms", clean)

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if self.n != other.n:
            raise DimensionError("cannot add polynomials in different variable counts")
        terms = dict(self.terms)
        for alpha, c in other.terms.items():
            terms[alpha] = terms.get(alpha, 0j) + c
        return MultiPoly(self.n, terms)

    def scale(self, factor: complex) -> "MultiPoly":
        return MultiPoly(self.n, {a: factor * c for a, c in self.terms.items()})


def parse_poly(text: str, n: int | None = None) -> MultiPoly:
    """Parse the one-term-per-line format ``coeff_re coeff_im : a1 ... an``.

    Blank lines and ``#`` comments are ignored; repeated monomials
    accumulate.  ``n`` is inferred from the first term unless given.
    """
    terms: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise FormatError(f"line {lineno}: missing ':' between coefficient and exponents")
        parts = head.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'coeff_re coeff_im' before ':'")
        try:
            coeff = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise FormatError(f"line {lineno}: bad coefficient {head.strip()!r}") from None
        try:
            alpha = tuple(int(tok) for tok in tail.split())
        except ValueError:
            raise FormatError(f"line {lineno}: bad exponent list {tail.strip()!r}") from None
        if not alpha:
            raise FormatError(f"line {lineno}: empty exponent list")
        if any(a < 0 for a in alpha):
            raise FormatError(f"line {lineno}: negative exponent in {alpha}")
        if n is None:
            n = len(alpha)
        if len(alpha) != n:
            raise FormatError(f"line {lineno}: {len(alpha)} exponents, expected {n}")
        terms[alpha] = terms.get(alpha, 0j) + coeff
    if n is None:
        raise FormatError("no polynomial terms found")
    return MultiPoly(n, terms)


def load_poly(path) -> MultiPoly:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read polynomial file {path}: {exc}") from exc
    try:
        return parse_poly(text)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def format_poly(p: MultiPoly) -> str:
    lines = []
    for alpha in sorted(p.terms, key=lambda a: (sum(a), a)):
        c = p.terms[alpha]
        lines.append(f"{c.real!r} {c.imag!r} : " + " ".join(str(a) for a in alpha))
    return "\n".join(lines) + "\n"


class OperatorTuple:
    """A tuple of commuting square matrices on one common space.

    Commutativity is enforced at construction: the largest pairwise
    commutator norm must not exceed ``tol``.
    """

    def __init__(self, mats, tol: float = COMMUTATIVITY_TOL):
        mats = tuple(as_matrix(m) for m in mats)
        if not mats:
            raise DimensionError("operator tuple must contain at least one matrix")
        d = mats[0].shape[0]
        for i, m in enumerate(mats):
            if m.shape != (d, d):
                raise DimensionError(f"matrix {i} has shape {m.shape}, expected ({d}, {d})")
        worst, worst_pair = 0.0, (0, 0)
        for j in range(len(mats)):
            for k in range(j + 1, len(mats)):
                dev = float(np.linalg.norm(mats[j] @ mats[k] - mats[k] @ mats[j], 2))
                if dev > worst:
                    worst, worst_pair = dev, (j, k)
        if worst > tol:
            raise CommutativityError(
                f"matrices {worst_pair[0]} and {worst_pair[1]} fail to commute: "
                f"commutator norm {worst:.3e} > {tol:.3e}"
            )
        self.mats = mats
        self.tol = tol
        self.max_commutator = worst

    @property
    def n(self) -> int:
        return len(self.mats)

    @property
    def dim(self) -> int:
        return self.mats[0].shape[0]

    def scaled(self, r: float) -> "OperatorTuple":
        """The tuple (r T_1, ..., r T_n)."""
        return OperatorTuple(tuple(r * m for m in self.mats), tol=self.tol)


def eval_scalar(p: MultiPoly, z) -> complex:
    """Evaluate p at a scalar point by direct monomial summation."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != p.n:
        raise DimensionError(f"point has {z.shape[0]} coordinates, expected {p.n}")
    total = 0j
    for alpha, c in p.terms.items():
        term = c
        for zk, a in zip(z, alpha):
            if a:
                term *= zk ** a
        total += term
    return complex(total)


def _eval_mats(p: MultiPoly, mats) -> np.ndarray:
    """p evaluated at square matrices, products taken left to right."""
    d = mats[0].shape[0]
    pows = []
    for k in range(len(mats)):
        need = max((alpha[k] for alpha in p.terms), default=0)
        cur = [np.eye(d, dtype=complex)]
        for _ in range(need):
            cur.append(cur[-1] @ mats[k])
        pows.append(cur)
    out = np.zeros((d, d), dtype=complex)
    for alpha, c in p.terms.items():
        term = pows[0][alpha[0]]
        for k in range(1, len(mats)):
            term = term @ pows[k][alpha[k]]
        out = out + c * term
    return out


def eval_tuple(p: MultiPoly, t: OperatorTuple) -> np.ndarray:
    """Evaluate p at a commuting tuple: sum of c_alpha T_1^a1 ... T_n^an."""
    if p.n != t.n:
        raise DimensionError(f"polynomial has {p.n} variables, tuple has {t.n}")
    return _eval_mats(p, t.mats)


# ---------------------------------------------------------------------------
# torus search


def torus_search_max(
    objective: Callable[[np.ndarray], np.ndarray],
    n: int,
    grid_per_axis: int,
    refine_steps: int,
    starts: int = 6,
) -> tuple[float, np.ndarray]:
    """Maximize a smooth function of torus points by grid search plus ascent.

    ``objective`` maps an (m, n) array of unimodular points to (m,) real
    values.  The uniform phase grid is scanned first; the best ``starts``
    grid points each seed ``refine_steps`` passes of coordinate-wise
    golden-section ascent (with early stop once a pass no longer improves).
    The returned value never falls below the best raw grid value, so nested
    grids give nondecreasing lower bounds.

    Returns (best value, best point).
    """
    if n < 1:
        raise DimensionError("need at least one torus variable")
    if grid_per_axis < 1:
        raise ValueError("grid_per_axis must be positive")
    if refine_steps < 0:
        raise ValueError("refine_steps must be nonnegative")
    if grid_per_axis ** n > _MAX_GRID_POINTS:
        raise ValueError(f"grid of {grid_per_axis}^{n} points is too large")
    axis = 2.0 * np.pi * np.arange(grid_per_axis) / grid_per_axis
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    phases = np.stack([m.ravel() for m in mesh], axis=1)
    values = np.empty(phases.shape[0])
    for i in range(0, phases.shape[0], _CHUNK):
        values[i:i + _CHUNK] = objective(np.exp(1j * phases[i:i + _CHUNK]))
    k = min(max(starts, 1), values.shape[0])
    # values within rounding noise of the max count as tied, and ties prefer
    # the earliest grid point, so flat objectives deterministically witness
    # zeta = (1, ..., 1)
    order = np.lexsort((np.arange(values.shape[0]), -values))
    noise = 1e-12 * max(1.0, abs(float(values[order[0]])))
    first = int(np.nonzero(values >= values[order[0]] - noise)[0][0])
    top = [idx for idx in order[:k] if idx != first]
    top = [first] + top[: k - 1]
    best_val = float(values[first])
    best_phi = phases[first].copy()
    width = 2.0 * np.pi / grid_per_axis
    for idx in top:
        phi = phases[idx].copy()
        val = float(values[idx])
        stalls = 0
        for _ in range(refine_steps):
            before = val
            for ax in range(n):
                phi[ax], val = _golden_axis(objective, phi, ax, width, val)
            if val - before <= 1e-14 * max(1.0, abs(val)):
                stalls += 1
                if stalls >= 2:
                    break
            else:
                stalls = 0
        if val > best_val + 1e-13 * max(1.0, abs(best_val)):
            best_val, best_phi = val, phi.copy()
    return best_val, np.exp(1j * best_phi)


def _golden_axis(objective, phi, ax, half_width, current):
    """Golden-section ascent along one phase coordinate; monotone in value."""
    probe = phi.copy()

    def value_at(t: float) -> float:
        probe[ax] = t
        return float(objective(np.exp(1j * probe)[None, :])[0])

    a = phi[ax] - half_width
    b = phi[ax] + half_width
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = value_at(c), value_at(d)
    best_t, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(30):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = value_at(c)
            if fc > best_f:
                best_t, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = value_at(d)
            if fd > best_f:
                best_t, best_f = d, fd
    # only move for improvements above rounding noise, so flat objectives
    # keep their grid witness instead of drifting on 1e-16 fluctuations
    if best_f > current + 1e-13 * max(1.0, abs(current)):
        return best_t, best_f
    return phi[ax], current


def _abs_objective(p: MultiPoly) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized |p| on a batch of points, via per-variable power tables."""
    if not p.terms:
        return lambda pts: np.zeros(pts.shape[0])
    alphas = list(p.terms.keys())
    coeffs = [p.terms[a] for a in alphas]
    need = [max(a[k] for a in alphas) for k in range(p.n)]

    def objective(pts: np.ndarray) -> np.ndarray:
        m = pts.shape[0]
        pows = []
        for k in range(p.n):
            cur = [np.ones(m, dtype=complex)]
            for _ in range(need[k]):
                cur.append(cur[-1] * pts[:, k])
            pows.append(cur)
        acc = np.zeros(m, dtype=complex)
        for alpha, c in zip(alphas, coeffs):
            term = np.full(m, c, dtype=complex)
            for k, a in enumerate(alpha):
                if a:
                    term = term * pows[k][a]
            acc += term
        return np.abs(acc)

    return objective


def pencil_norm_objective(mats) -> Callable[[np.ndarray], np.ndarray]:
    """Batched spectral norm of the pencil sum_k zeta_k M_k."""
    stack = np.stack([as_matrix(m) for m in mats])

    def objective(pts: np.ndarray) -> np.ndarray:
        pencil = np.tensordot(pts, stack, axes=(1, 0))
        return np.linalg.svd(pencil, compute_uv=False)[:, 0]

    return objective


class SupInterval(NamedTuple):
    """Bracket for a torus sup: lower <= true sup <= upper."""

    lower: float
    upper: float
    witness: np.ndarray


def torus_sup(p: MultiPoly, grid_per_axis: int = 64, refine_steps: int = 200) -> SupInterval:
    """Bracket sup |p| over the unit torus.

    ``lower`` is the best value found by grid search plus ascent (a true
    lower bound with the maximizing point as witness); ``upper`` is the
    coefficient-sum bound, the certified part of the interval.
    """
    if grid_per_axis < 4:
        raise ValueError("grid_per_axis must be at least 4")
    upper = float(sum(abs(c) for c in p.terms.values()))
    found, point = torus_search_max(_abs_objective(p), p.n, grid_per_axis, refine_steps)
    return SupInterval(lower=min(found, upper), upper=upper, witness=point)


def row_symbol_sup(x, grid_per_axis: int = 64, refine_steps: int = 200) -> float:
    """Search sup over the torus of || sum_k zeta_k X_k ||.

    By the maximum principle for operator-valued analytic functions this
    equals the sup over the closed polydisk.  Lower-bound flavor: grid plus
    golden-section ascent.
    """
    mats = [as_matrix(m) for m in x]
    shape = mats[0].shape
    for i, m in enumerate(mats):
        if m.shape != shape:
            raise DimensionError(f"matrix {i} has shape {m.shape}, expected {shape}")
    found, _ = torus_search_max(pencil_norm_objective(mats), len(mats), grid_per_axis, refine_steps)
    return found
