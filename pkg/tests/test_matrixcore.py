import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import polyreal as pr
from polyreal.errors import DimensionError, SingularityError

from helpers import random_complex, random_unitary


def test_operator_norm_identity():
    assert pr.operator_norm(np.eye(5)) == pytest.approx(1.0, abs=1e-14)


def test_operator_norm_rank_one():
    m = np.zeros((5, 5))
    m[4, 0] = 1.0
    assert pr.operator_norm(m) == pytest.approx(1.0, abs=1e-14)


def test_operator_norm_kv_violation_matrix():
    kvd = pr.build_kv()
    m = pr.eval_tuple(kvd.p, kvd.t)
    assert pr.operator_norm(m) == pytest.approx(3.0 * np.sqrt(3.0) / 5.0, abs=1e-13)


def test_operator_norm_rejects_empty():
    with pytest.raises(DimensionError):
        pr.operator_norm(np.zeros((0, 3)))


def test_kron_identities():
    assert np.array_equal(pr.kron(np.eye(2), np.eye(3)), np.eye(6))


def test_kron_rank_one_block_placement():
    e = np.eye(5)
    rank_one = np.outer(e[1], e[0])
    x = random_complex(np.random.default_rng(0), 3, 3)
    k = pr.kron(rank_one, x)
    assert np.allclose(k[3:6, 0:3], x)
    k[3:6, 0:3] = 0
    assert np.abs(k).max() == 0


def test_kron_norm_multiplicative():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = random_complex(rng, 3, 3)
        b = random_complex(rng, 3, 3)
        assert pr.operator_norm(pr.kron(a, b)) == pytest.approx(
            pr.operator_norm(a) * pr.operator_norm(b), rel=1e-10
        )


@settings(max_examples=25, deadline=None)
@given(
    a=arrays(np.float64, (2, 3), elements=st.floats(-2, 2)),
    b=arrays(np.float64, (3, 2), elements=st.floats(-2, 2)),
)
def test_kron_norm_multiplicative_hypothesis(a, b):
    na, nb = pr.operator_norm(a + 0j), pr.operator_norm(b + 0j)
    assert pr.operator_norm(pr.kron(a, b)) == pytest.approx(na * nb, rel=1e-10, abs=1e-12)


def test_block_assemble_single():
    a = random_complex(np.random.default_rng(2), 2, 3)
    assert np.array_equal(pr.block_assemble([[a]]), a)


def test_block_assemble_scalar_grid():
    out = pr.block_assemble([[np.zeros((1, 1)), np.zeros((1, 1))], [np.full((1, 1), 7.0), np.zeros((1, 1))]])
    assert np.array_equal(out, np.array([[0, 0], [7.0, 0]]))


def test_block_assemble_round_trip():
    rng = np.random.default_rng(3)
    a, b = random_complex(rng, 3, 3), random_complex(rng, 3, 2)
    c, d = random_complex(rng, 1, 3), random_complex(rng, 1, 2)
    g = pr.block_assemble([[a, b], [c, d]])
    assert np.array_equal(g[:3, :3], a)
    assert np.array_equal(g[:3, 3:], b)
    assert np.array_equal(g[3:, :3], c)
    assert np.array_equal(g[3:, 3:], d)


def test_block_assemble_reports_offending_indices():
    with pytest.raises(DimensionError, match=r"\(1, 1\)"):
        pr.block_assemble([[np.eye(2), np.eye(2)], [np.eye(2), np.eye(3)]])


def test_resolvent_zero_w():
    rhs = random_complex(np.random.default_rng(4), 3, 2)
    assert np.allclose(pr.resolvent_apply(np.zeros((3, 3)), rhs), rhs)


def test_resolvent_geometric_series():
    out = pr.resolvent_apply(0.5 * np.eye(2), np.eye(2))
    assert np.allclose(out, 2.0 * np.eye(2))


def test_resolvent_neumann_oracle():
    rng = np.random.default_rng(5)
    w = random_complex(rng, 4, 4)
    w *= 0.9 / pr.operator_norm(w)
    rhs = random_complex(rng, 4, 2)
    series = np.zeros_like(rhs)
    term = rhs.copy()
    for _ in range(61):
        series += term
        term = w @ term
    assert np.allclose(pr.resolvent_apply(w, rhs), series, atol=1e-8)


def test_resolvent_singular():
    with pytest.raises(SingularityError, match="norm"):
        pr.resolvent_apply(np.eye(2), np.eye(2))


def test_resolvent_residual_bound_random():
    rng = np.random.default_rng(6)
    for _ in range(100):
        d = rng.integers(1, 8)
        w = random_complex(rng, d, d)
        w *= rng.uniform(0, 0.95) / pr.operator_norm(w)
        rhs = random_complex(rng, d, 2)
        x = pr.resolvent_apply(w, rhs)
        residual = pr.operator_norm((np.eye(d) - w) @ x - rhs)
        assert residual <= 1e-10 * pr.operator_norm(rhs)


def test_is_psd_identity():
    cert = pr.is_psd(np.eye(3), 1e-10)
    assert cert.passed and cert.margin == pytest.approx(1.0, abs=1e-14)


def test_is_psd_failure_witness():
    cert = pr.is_psd(np.diag([1.0, -0.1]), 1e-10)
    assert not cert.passed
    assert cert.margin == pytest.approx(-0.1, abs=1e-14)
    assert abs(cert.witness[1]) == pytest.approx(1.0, abs=1e-12)


def test_is_psd_boundary():
    x = np.eye(2) / np.sqrt(3.0)
    gram = np.eye(2) - 3 * (x.conj().T @ x)
    cert = pr.is_psd(gram, 1e-10)
    assert cert.passed
    assert abs(cert.margin) < 1e-14


def test_is_psd_rejects_non_hermitian():
    with pytest.raises(ValueError, match="Hermitian"):
        pr.is_psd(np.array([[0.0, 1.0], [0.0, 0.0]]), 1e-10)


def test_operator_norm_unitary_invariance():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = random_complex(rng, 4, 3)
        u = random_unitary(rng, 4)
        v = random_unitary(rng, 3)
        assert pr.operator_norm(u @ m @ v) == pytest.approx(pr.operator_norm(m), rel=1e-10)


def test_is_psd_agrees_with_quadratic_forms():
    rng = np.random.default_rng(8)
    indefinite = random_complex(rng, 4, 4)
    indefinite = indefinite + indefinite.conj().T
    gram = random_complex(rng, 4, 4)
    for h in (indefinite, gram.conj().T @ gram):
        tol = 1e-9
        cert = pr.is_psd(h, tol)
        quad_ok = True
        for _ in range(1000):
            x = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            if (x.conj() @ h @ x).real < -tol * np.linalg.norm(x) ** 2:
                quad_ok = False
                break
        assert cert.passed == quad_ok


def test_certificate_requires_witness_on_fail():
    with pytest.raises(ValueError):
        pr.Certificate(passed=False, margin=-1.0, tolerance=1e-9, description="x")


def test_certificate_to_dict_serializes_complex():
    cert = pr.Certificate(
        passed=False, margin=-1.0, tolerance=1e-9, description="x",
        witness=np.array([1.0 + 2.0j]),
    )
    d = cert.to_dict()
    assert d["verdict"] == "fail"
    assert d["witness"] == [[1.0, 2.0]]
