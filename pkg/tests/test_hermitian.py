import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blockjacobi.hermitian import (
    ConvergenceError,
    DimensionError,
    NotPSDError,
    SymmetryError,
    hermitian_eigensystem,
    hermitian_eigenvalues,
    nuclear_norm,
    psd_sqrt,
    singular_values,
)
import blockjacobi.hermitian as kernel

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_hermitian(rng, n, scale=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cubic_roots_hermitian(h):
    """Eigenvalues of a 3x3 Hermitian matrix from its characteristic polynomial
    (trigonometric solution of the depressed cubic)."""
    tr = h[0, 0].real + h[1, 1].real + h[2, 2].real
    c1 = sum(
        (h[i, i] * h[j, j] - h[i, j] * h[j, i]).real for i, j in ((0, 1), (0, 2), (1, 2))
    )
    det = np.linalg.det(h).real
    # lambda^3 - tr lambda^2 + c1 lambda - det = 0, substitute lambda = t + tr/3
    shift = tr / 3.0
    p = c1 - tr * tr / 3.0
    q = -2.0 * tr**3 / 27.0 + tr * c1 / 3.0 - det
    if p > -1e-300:
        return np.array([shift] * 3)
    r = 2.0 * math.sqrt(-p / 3.0)
    arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
    phi = math.acos(arg) / 3.0
    roots = [shift + r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    return np.sort(roots)


def test_identity_and_swap():
    assert hermitian_eigenvalues(np.eye(2)).tolist() == [1.0, 1.0]
    np.testing.assert_allclose(hermitian_eigenvalues([[0, 1], [1, 0]]), [-1.0, 1.0], atol=1e-15)


def test_eigensystem_simple_cases():
    es = hermitian_eigensystem(np.eye(2))
    assert es.values.tolist() == [1.0, 1.0]
    np.testing.assert_allclose(es.vectors.conj().T @ es.vectors, np.eye(2), atol=1e-15)

    es = hermitian_eigensystem([[2, 0], [0, 3]])
    assert es.values.tolist() == [2.0, 3.0]
    np.testing.assert_allclose(np.abs(es.vectors), np.eye(2))

    h = np.array([[0, -1j], [1j, 0]])
    es = hermitian_eigensystem(h)
    np.testing.assert_allclose(es.values, [-1.0, 1.0], atol=1e-15)
    recon = es.vectors @ np.diag(es.values) @ es.vectors.conj().T
    assert np.abs(recon - h).max() <= 1e-12


def test_cubic_oracle_agrees_with_reference():
    # oracle self-check on a matrix with known spectrum
    rng = np.random.default_rng(1)
    u = random_unitary(rng, 3)
    h = u @ np.diag([-1.5, 0.25, 2.0]) @ u.conj().T
    np.testing.assert_allclose(cubic_roots_hermitian(h), [-1.5, 0.25, 2.0], atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_three_by_three_matches_characteristic_polynomial(seed):
    h = random_hermitian(np.random.default_rng(seed), 3)
    np.testing.assert_allclose(hermitian_eigenvalues(h), cubic_roots_hermitian(h), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n=st.integers(1, 12))
def test_eigensystem_invariants(seed, n):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n, scale=rng.uniform(0.1, 10))
    es = hermitian_eigensystem(h)
    hmax = np.abs(h).max()
    assert np.all(np.diff(es.values) >= 0)
    assert np.abs(es.vectors.conj().T @ es.vectors - np.eye(n)).max() <= 1e-10
    recon = es.vectors @ np.diag(es.values) @ es.vectors.conj().T
    assert np.abs(recon - h).max() <= 1e-9 * (1 + hmax)
    assert es.values.tolist() == hermitian_eigenvalues(h).tolist()
    assert abs(es.values.sum() - np.trace(h).real) <= 1e-9 * (1 + hmax)
    np.testing.assert_allclose(es.values, np.linalg.eigvalsh(h), atol=1e-12 * (1 + np.linalg.norm(h, 2)))


def test_stacked_input_solves_each_member():
    rng = np.random.default_rng(3)
    stack = np.array([random_hermitian(rng, 5) for _ in range(7)]).reshape(7, 5, 5)
    w = hermitian_eigenvalues(stack)
    assert w.shape == (7, 5)
    for k in range(7):
        np.testing.assert_allclose(w[k], hermitian_eigenvalues(stack[k]), atol=1e-13)


def test_weyl_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(2, 11))
        a = random_hermitian(rng, n)
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        p = g @ g.conj().T
        assert np.all(hermitian_eigenvalues(a) <= hermitian_eigenvalues(a + p) + 1e-9)


def test_determinism():
    h = random_hermitian(np.random.default_rng(5), 9)
    first = hermitian_eigensystem(h)
    second = hermitian_eigensystem(h.copy())
    assert first.values.tobytes() == second.values.tobytes()
    assert first.vectors.tobytes() == second.vectors.tobytes()


def test_degenerate_and_zero_matrices():
    assert hermitian_eigenvalues(np.zeros((4, 4))).tolist() == [0.0] * 4
    np.testing.assert_allclose(hermitian_eigenvalues(np.ones((4, 4))), [0, 0, 0, 4], atol=1e-14)


def test_input_errors():
    with pytest.raises(DimensionError):
        hermitian_eigenvalues(np.zeros((2, 3)))
    with pytest.raises(SymmetryError):
        hermitian_eigenvalues([[0, 1], [0, 0]])
    # round-off asymmetry is tolerated
    h = np.array([[1.0, 2.0], [2.0 + 1e-12, 1.0]])
    np.testing.assert_allclose(hermitian_eigenvalues(h), [-1.0, 3.0], atol=1e-11)


def test_convergence_failure_is_raised(monkeypatch):
    monkeypatch.setattr(kernel, "MAX_SWEEPS", 1)
    with pytest.raises(ConvergenceError):
        hermitian_eigenvalues(random_hermitian(np.random.default_rng(0), 8))


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(psd_sqrt([[4.0]]), [[2.0]])
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    s = psd_sqrt(m)
    assert np.abs(s @ s - m).max() <= 1e-12
    assert np.all(hermitian_eigenvalues(s) >= 0)


def test_psd_sqrt_clamps_round_off_and_rejects_negative():
    m = np.diag([1.0, -1e-13])
    np.testing.assert_allclose(psd_sqrt(m), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -1e-3]))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(1, 8))
def test_psd_sqrt_properties(seed, n):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = g @ g.conj().T
    s = psd_sqrt(m)
    assert np.abs(s - s.conj().T).max() == 0.0
    assert np.abs(s @ s - m).max() <= 1e-9 * (1 + np.abs(m).max())
    np.testing.assert_allclose(psd_sqrt(s @ s), s, atol=1e-8)


def test_singular_values_examples():
    np.testing.assert_allclose(singular_values(np.eye(3)), [1, 1, 1], atol=1e-15)
    np.testing.assert_allclose(singular_values([[0, 2], [0, 0]]), [2, 0], atol=1e-15)
    assert singular_values(np.ones((2, 3))).shape == (2,)


@pytest.mark.parametrize("seed", range(10))
def test_singular_values_match_gram_eigenvalues(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    sv = singular_values(a)
    assert np.all(np.diff(sv) <= 0) and np.all(sv >= 0)
    gram = hermitian_eigenvalues(a @ a.conj().T)[::-1]
    np.testing.assert_allclose(sv, np.sqrt(np.clip(gram, 0, None)), atol=1e-10)
    np.testing.assert_allclose(sv, np.linalg.svd(a, compute_uv=False), atol=1e-12)


def test_nuclear_norm_examples():
    assert nuclear_norm(np.eye(4)) == pytest.approx(4.0, abs=1e-14)
    assert nuclear_norm(np.zeros((3, 3))) == 0.0
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    # singular values are the golden ratio and its inverse, summing to sqrt(5)
    assert nuclear_norm(a) == pytest.approx(math.sqrt(5.0), abs=1e-12)
    via_sqrt = np.trace(psd_sqrt(a @ a.T)).real
    assert abs(nuclear_norm(a) - via_sqrt) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=seeds, n=st.integers(1, 5))
def test_nuclear_norm_invariances(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u = random_unitary(rng, n)
    assert abs(nuclear_norm(a @ u) - nuclear_norm(a)) <= 1e-9
    assert abs(nuclear_norm(a.conj().T) - nuclear_norm(a)) <= 1e-12 * (1 + nuclear_norm(a))


def test_scalar_nuclear_norm_is_modulus():
    z = 3.0 - 4.0j
    assert nuclear_norm([[z]]) == pytest.approx(abs(z), abs=1e-15)
    assert cmath.isclose(singular_values([[z]])[0], 5.0)
