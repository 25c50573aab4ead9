"""Periodic block Jacobi operators and their Floquet symbols.

The operator acts on vector sequences ``y_n`` in ``C^m`` as

    (J y)_n = a_n y_{n+1} + b_n y_n + a_{n-1}^* y_{n-1}

with ``p``-periodic ``m x m`` coefficients. Sites are stored 0-based: ``a[k]``
couples site ``k`` to site ``k + 1`` and ``a[p - 1]`` is the wrap-around
(corner) coupling from the last site of one period to the first of the next.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from blockjacobi.hermitian import HERMITICITY_RTOL, max_abs, nuclear_norm, psd_sqrt


class OperatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PeriodicJacobiOperator:
    """Coefficient data of a ``p``-periodic Jacobi operator with ``m x m`` blocks.

    ``corner_index`` records which original coefficient sits in the corner
    position after :func:`rotate_to_minimal_corner`; it is metadata only.
    """

    p: int
    m: int
    a: tuple[np.ndarray, ...]
    b: tuple[np.ndarray, ...]
    corner_index: int | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(np.array(x, dtype=np.complex128) for x in self.a))
        object.__setattr__(self, "b", tuple(np.array(x, dtype=np.complex128) for x in self.b))
        for blk in self.a + self.b:
            blk.setflags(write=False)
        if self.corner_index is None:
            object.__setattr__(self, "corner_index", self.p - 1)

    @property
    def size(self) -> int:
        """Fiber dimension ``N = p * m``."""
        return self.p * self.m

    @property
    def corner(self) -> np.ndarray:
        return self.a[-1]

    def coefficient_scale(self) -> float:
        return float(max((max_abs(x) for x in self.a + self.b), default=0.0))

    def same_as(self, other: PeriodicJacobiOperator) -> bool:
        return (
            self.p == other.p
            and self.m == other.m
            and len(self.a) == len(other.a)
            and len(self.b) == len(other.b)
            and all(np.array_equal(x, y) for x, y in zip(self.a, other.a))
            and all(np.array_equal(x, y) for x, y in zip(self.b, other.b))
        )


def validate(op: PeriodicJacobiOperator) -> list[str]:
    """Every violated structural invariant, as human-readable messages; empty if valid."""
    problems = []
    if not isinstance(op.p, (int, np.integer)) or op.p < 1:
        problems.append(f"period p must be a positive integer, got {op.p!r}")
    if not isinstance(op.m, (int, np.integer)) or op.m < 1:
        problems.append(f"block size m must be a positive integer, got {op.m!r}")
    for name, blocks in (("a", op.a), ("b", op.b)):
        if len(blocks) != op.p:
            problems.append(f"{name} has {len(blocks)} blocks, expected p={op.p}")
        for k, blk in enumerate(blocks):
            if blk.shape != (op.m, op.m):
                problems.append(f"{name}[{k}] has shape {blk.shape}, expected ({op.m}, {op.m})")
                continue
            if not np.all(np.isfinite(blk)):
                problems.append(f"{name}[{k}] has non-finite entries")
                continue
            if name == "b":
                asym = float(max_abs(blk - blk.conj().T))
                if asym > HERMITICITY_RTOL * (1.0 + float(max_abs(blk))):
                    problems.append(f"b[{k}] is not Hermitian (max asymmetry {asym:.3e})")
    return problems


def _require_valid(op: PeriodicJacobiOperator) -> None:
    problems = validate(op)
    if problems:
        raise OperatorError("invalid operator: " + "; ".join(problems))


def rotate_to_minimal_corner(op: PeriodicJacobiOperator) -> PeriodicJacobiOperator:
    """Cyclically relabel sites so the coupling with least nuclear norm is the corner.

    Ties go to the smallest index, except that an operator whose corner already
    attains the minimum is returned unchanged. A shift of the lattice is
    unitary, so the spectrum is unchanged.
    """
    norms = [nuclear_norm(x) for x in op.a]
    k = min(range(op.p), key=lambda i: (norms[i], i))
    if k == op.p - 1 or norms[-1] == norms[k]:
        return op
    shift = k + 1
    a = op.a[shift:] + op.a[:shift]
    b = op.b[shift:] + op.b[:shift]
    origin = op.corner_index if op.corner_index is not None else op.p - 1
    return PeriodicJacobiOperator(op.p, op.m, a, b, corner_index=(origin + shift) % op.p)


def unroll(op: PeriodicJacobiOperator, k: int) -> PeriodicJacobiOperator:
    """The same lattice operator viewed with period ``k * p``."""
    if k < 1:
        raise OperatorError(f"unroll factor must be >= 1, got {k}")
    if k == 1:
        return op
    return PeriodicJacobiOperator(op.p * k, op.m, op.a * k, op.b * k, corner_index=op.corner_index)


def normalize(op: PeriodicJacobiOperator) -> PeriodicJacobiOperator:
    """Rotate the minimal coupling into the corner, then unroll to period >= 3."""
    _require_valid(op)
    rot = rotate_to_minimal_corner(op)
    return unroll(rot, math.ceil(3 / rot.p))


def _check_period(op: PeriodicJacobiOperator) -> None:
    if op.p < 3:
        raise OperatorError(f"symbol assembly needs p >= 3 (got p={op.p}); call unroll() first")


def _tridiagonal_part(op: PeriodicJacobiOperator) -> np.ndarray:
    m, p = op.m, op.p
    k = np.zeros((p * m, p * m), dtype=np.complex128)
    for i in range(p):
        k[i * m:(i + 1) * m, i * m:(i + 1) * m] = op.b[i]
    for i in range(p - 1):
        k[i * m:(i + 1) * m, (i + 1) * m:(i + 2) * m] = op.a[i]
        k[(i + 1) * m:(i + 2) * m, i * m:(i + 1) * m] = op.a[i].conj().T
    return k


def floquet_symbol(op: PeriodicJacobiOperator, x) -> np.ndarray:
    """Fiber matrix ``K(x)``; ``x`` may be a scalar or a 1-D array of angles.

    For an array the result is a stack ``(len(x), pm, pm)``.
    """
    _check_period(op)
    m, n = op.m, op.size
    x = np.asarray(x, dtype=np.float64)
    base = _tridiagonal_part(op)
    phase = np.exp(1j * x)
    k = np.broadcast_to(base, x.shape + base.shape).copy()
    corner = op.corner
    k[..., : m, n - m:] = np.conj(phase)[..., None, None] * corner.conj().T
    k[..., n - m:, : m] = phase[..., None, None] * corner
    return k


@dataclass(frozen=True, eq=False)
class SymbolSplit:
    """``K(x) = k0 + K1(x)`` together with the x-independent modulus ``|K1|``."""

    k0: np.ndarray
    abs_k1: np.ndarray
    corner_index: int


def split_symbol(op: PeriodicJacobiOperator) -> SymbolSplit:
    _check_period(op)
    m, n = op.m, op.size
    c = op.corner
    abs_k1 = np.zeros((n, n), dtype=np.complex128)
    abs_k1[:m, :m] = psd_sqrt(c.conj().T @ c)
    abs_k1[n - m:, n - m:] = psd_sqrt(c @ c.conj().T)
    return SymbolSplit(k0=_tridiagonal_part(op), abs_k1=abs_k1, corner_index=op.corner_index)


def truncated_matrix(op: PeriodicJacobiOperator, periods: int) -> np.ndarray:
    """Finite section on ``periods * p`` sites with Dirichlet (dropped) boundary couplings."""
    _require_valid(op)
    if periods < 1:
        raise OperatorError(f"periods must be >= 1, got {periods}")
    sites = periods * op.p
    m = op.m
    t = np.zeros((sites * m, sites * m), dtype=np.complex128)
    for s in range(sites):
        t[s * m:(s + 1) * m, s * m:(s + 1) * m] = op.b[s % op.p]
        if s + 1 < sites:
            a = op.a[s % op.p]
            t[s * m:(s + 1) * m, (s + 1) * m:(s + 2) * m] = a
            t[(s + 1) * m:(s + 2) * m, s * m:(s + 1) * m] = a.conj().T
    return t
