"""Dense complex Hermitian kernel: Jacobi eigensolver, PSD square root, singular values.

Matrices are plain ``numpy`` complex arrays. The eigenvalue routines accept a
single ``(N, N)`` matrix or a stack ``(..., N, N)`` and solve every member
independently; the stacked form is what the band sampler uses.

The eigensolver is a cyclic Jacobi method in round-robin (tournament) order:
each sweep consists of ``N - 1`` steps of ``N // 2`` disjoint rotations, which
commute and are applied together. The order is fixed, so results are
deterministic for identical input bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERMITICITY_RTOL = 1e-10
PSD_CLAMP_RTOL = 1e-10
OFFDIAG_RTOL = 1e-12
MAX_SWEEPS = 100


class HermitianError(ValueError):
    """Base class for kernel input/convergence failures."""


class DimensionError(HermitianError):
    pass


class SymmetryError(HermitianError):
    pass


class NotPSDError(HermitianError):
    pass


class ConvergenceError(HermitianError, ArithmeticError):
    pass


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues and a unitary matrix whose columns are eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray


def max_abs(a: np.ndarray) -> np.ndarray:
    """Entrywise max-norm over the last two axes."""
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(a.shape[:-2])
    return np.abs(a).max(axis=(-2, -1))


def _check_hermitian(h) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise DimensionError(f"expected a square matrix, got shape {h.shape}")
    if h.shape[-1] == 0:
        raise DimensionError("empty matrix")
    if not np.all(np.isfinite(h)):
        raise HermitianError("matrix has non-finite entries")
    hh = np.conj(np.swapaxes(h, -1, -2))
    asym = max_abs(h - hh)
    limit = HERMITICITY_RTOL * (1.0 + max_abs(h))
    if np.any(asym > limit):
        worst = float(np.max(asym - limit))
        raise SymmetryError(f"matrix is not Hermitian (excess asymmetry {worst:.3e})")
    return 0.5 * (h + hh)


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint (p, q) index pairs for each step of one sweep, p < q."""
    m = n + (n % 2)
    players = list(range(m))
    steps = []
    for _ in range(m - 1):
        pairs = []
        for k in range(m // 2):
            i, j = players[k], players[m - 1 - k]
            if i < n and j < n:
                pairs.append((min(i, j), max(i, j)))
        pairs.sort()
        p = np.array([a for a, _ in pairs], dtype=np.intp)
        q = np.array([b for _, b in pairs], dtype=np.intp)
        steps.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(steps)


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    off = np.abs(a) ** 2
    off[..., np.arange(n), np.arange(n)] = 0.0
    return np.sqrt(np.sum(off, axis=(-2, -1)))


def _sweep(a: np.ndarray, v: np.ndarray | None) -> None:
    """One in-place round-robin Jacobi sweep over a stack ``(B, N, N)``."""
    for p, q in _round_robin(a.shape[-1]):
        app = a[:, p, p].real
        aqq = a[:, q, q].real
        apq = a[:, p, q]
        r = np.abs(apq)
        # signed zeros must not change the rotation
        u = np.where(r > 0.0, np.exp(1j * np.angle(apq)), 1.0)
        d = aqq - app
        denom = np.abs(d) + np.hypot(d, 2.0 * r)
        sgn = np.where(d < 0.0, -1.0, 1.0)
        t = np.where(denom > 0.0, 2.0 * r * sgn / np.where(denom > 0.0, denom, 1.0), 0.0)
        c = 1.0 / np.sqrt(1.0 + t * t)
        s = t * c
        su_bar = s * np.conj(u)
        cu_bar = c * np.conj(u)

        cp = a[:, :, p]
        cq = a[:, :, q]
        a[:, :, p] = c[:, None, :] * cp - su_bar[:, None, :] * cq
        a[:, :, q] = s[:, None, :] * cp + cu_bar[:, None, :] * cq
        rp = a[:, p, :]
        rq = a[:, q, :]
        a[:, p, :] = c[:, :, None] * rp - np.conj(su_bar)[:, :, None] * rq
        a[:, q, :] = s[:, :, None] * rp + np.conj(cu_bar)[:, :, None] * rq
        a[:, p, q] = 0.0
        a[:, q, p] = 0.0
        a[:, p, p] = app - t * r
        a[:, q, q] = aqq + t * r

        if v is not None:
            vp = v[:, :, p]
            vq = v[:, :, q]
            v[:, :, p] = c[:, None, :] * vp - su_bar[:, None, :] * vq
            v[:, :, q] = s[:, None, :] * vp + cu_bar[:, None, :] * vq


def _jacobi(h: np.ndarray, tol: float, want_vectors: bool):
    shape = h.shape
    n = shape[-1]
    a = h.reshape(-1, n, n).copy()
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if want_vectors else None
    thresh = tol * np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    active = np.nonzero(_offdiag_norm(a) > thresh)[0]
    sweeps = 0
    while active.size:
        if sweeps == MAX_SWEEPS:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps "
                f"({active.size} matrices unconverged, first at flat index {int(active[0])})"
            )
        sub = a[active]
        subv = v[active] if want_vectors else None
        _sweep(sub, subv)
        a[active] = sub
        if want_vectors:
            v[active] = subv
        still = _offdiag_norm(sub) > thresh[active]
        active = active[still]
        sweeps += 1
    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(shape[:-1])
    if not want_vectors:
        return w, None
    v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(shape)
    return w, v


def hermitian_eigenvalues(h, tol: float = OFFDIAG_RTOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix (or stack of them), ascending along the last axis.

    ``tol`` is the relative off-diagonal Frobenius mass at which the Jacobi
    iteration stops. Raises :class:`DimensionError`, :class:`SymmetryError`
    or :class:`ConvergenceError`.
    """
    w, _ = _jacobi(_check_hermitian(h), tol, want_vectors=False)
    return w


def hermitian_eigensystem(h, tol: float = OFFDIAG_RTOL) -> EigenSystem:
    w, v = _jacobi(_check_hermitian(h), tol, want_vectors=True)
    return EigenSystem(values=w, vectors=v)


def psd_sqrt(m) -> np.ndarray:
    """Hermitian PSD square root via the eigendecomposition.

    Eigenvalues down to ``-1e-10 * (1 + max|M|)`` are treated as round-off and
    clamped to zero; anything more negative raises :class:`NotPSDError`.
    """
    es = hermitian_eigensystem(m)
    m = np.asarray(m, dtype=np.complex128)
    floor = -PSD_CLAMP_RTOL * (1.0 + max_abs(m))
    if np.any(es.values[..., 0] < floor):
        raise NotPSDError(f"smallest eigenvalue {float(np.min(es.values[..., 0])):.3e} is negative")
    root = np.sqrt(np.clip(es.values, 0.0, None))
    vecs = es.vectors
    s = (vecs * root[..., None, :]) @ np.conj(np.swapaxes(vecs, -1, -2))
    return 0.5 * (s + np.conj(np.swapaxes(s, -1, -2)))


def singular_values(a) -> np.ndarray:
    """Singular values in descending order, ``min(rows, cols)`` of them.

    Computed as the non-negative eigenvalues of the Hermitian dilation
    ``[[0, A], [A*, 0]]``, which keeps small singular values accurate to
    round-off relative to ``|A|`` rather than its square root.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    rows, cols = a.shape
    if not np.all(np.isfinite(a)):
        raise HermitianError("matrix has non-finite entries")
    dil = np.zeros((rows + cols, rows + cols), dtype=np.complex128)
    dil[:rows, rows:] = a
    dil[rows:, :rows] = np.conj(a.T)
    w = hermitian_eigenvalues(dil)
    k = min(rows, cols)
    return np.clip(w[::-1][:k], 0.0, None)


def nuclear_norm(a) -> float:
    """Trace norm ``Tr (A A*)^(1/2)``, the sum of singular values."""
    return float(np.sum(singular_values(a)))
