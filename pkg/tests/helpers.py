"""Shared random generators and paths for the test suite."""

import pathlib

import numpy as np

import polyreal as pr

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def random_unitary(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_contraction(rng, d, cap=1.0):
    m = random_complex(rng, d, d)
    return m * (cap * rng.uniform(0.2, 1.0) / pr.operator_norm(m))


def random_commuting_tuple(rng, n, d, cap=1.0):
    """Simultaneously diagonalizable contractions: exact commutation."""
    u = random_unitary(rng, d)
    mats = []
    for _ in range(n):
        eig = cap * rng.uniform(0.1, 1.0, size=d) * np.exp(2j * np.pi * rng.random(d))
        mats.append(u @ np.diag(eig) @ u.conj().T)
    return pr.OperatorTuple(mats)


def _split_system(gs, state, in_dim, out_dim):
    A = [g[:state, :state] for g in gs]
    B = [g[:state, state:] for g in gs]
    C = [g[state:, :state] for g in gs]
    D = [g[state:, state:] for g in gs]
    return pr.ScatteringSystem(A, B, C, D)


def random_dissipative_system(rng, n, state, in_dim=1, out_dim=1, total=0.4):
    """sum_k ||G_k|| <= total < 1, so the block symbol is contractive outright."""
    gs = []
    for _ in range(n):
        g = random_complex(rng, state + out_dim, state + in_dim)
        gs.append(g * (total / n / pr.operator_norm(g)))
    return _split_system(gs, state, in_dim, out_dim)


def random_nilpotent_dissipative(rng, n, state, total=0.9):
    """Strictly lower-triangular A blocks: the transfer series terminates."""
    gs = []
    for _ in range(n):
        g = random_complex(rng, state + 1, state + 1)
        g[:state, :state] = np.tril(g[:state, :state], k=-1)
        gs.append(g)
    scale = total / sum(pr.operator_norm(g) for g in gs)
    return _split_system([g * scale for g in gs], state, 1, 1)


def admissible_triple(rng, d, grid=12, refine=30):
    """Random X triple scaled so the row symbol sup is just below 1."""
    x = [random_complex(rng, d, d) for _ in range(3)]
    sup = pr.row_symbol_sup(x, grid, refine)
    return [m / (sup * (1.0 + 1e-6)) for m in x]
