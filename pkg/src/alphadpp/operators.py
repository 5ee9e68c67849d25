"""Kernels on a finite ground space {0, ..., d-1} with counting measure.

On a finite space an integral operator is just its d x d matrix, the
Fredholm determinant is det(I + alpha K), and a configuration of points is a
multiplicity vector (n_0, ..., n_{d-1}).
"""
from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from .alpha_det import (
    AlphaClass,
    alpha_det_block,
    alpha_det_enum,
    as_alpha,
    as_square_matrix,
)
from .errors import (
    DimensionTooLarge,
    EmptyExpansion,
    EmptySubset,
    OutsideConvergenceDomain,
    SingularOperator,
)

HERMITIAN_TOL = 1e-12
SINGULAR_TOL = 1e-12
# block expansions up to this total are evaluated by permutation enumeration
ENUM_TOTAL = 8
EXPANSION_BOUND = 20


class KernelMatrix:
    """Immutable d x d complex kernel matrix."""

    __slots__ = ("entries", "hermitian")

    def __init__(self, entries):
        arr = np.array(as_square_matrix(entries), dtype=complex)
        arr.setflags(write=False)
        self.entries = arr
        scale = max(1.0, float(np.abs(arr).max()))
        self.hermitian = bool(np.abs(arr - arr.conj().T).max() <= HERMITIAN_TOL * scale)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.entries.imag == 0))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def scaled(self, factor) -> "KernelMatrix":
        return KernelMatrix(factor * self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"KernelMatrix(dim={self.dim}, hermitian={self.hermitian})"


def as_kernel(K) -> KernelMatrix:
    return K if isinstance(K, KernelMatrix) else KernelMatrix(K)


def site_subset(indices, d: int) -> tuple[int, ...]:
    """Validate a subset of sites; returns it sorted and deduplicated."""
    out = tuple(sorted(set(int(i) for i in indices)))
    if not out:
        raise EmptySubset("site subset must be nonempty")
    if out[0] < 0 or out[-1] >= d:
        raise ValueError(f"site indices must lie in [0, {d})")
    return out


def nonempty_subsets(d: int) -> Iterator[tuple[int, ...]]:
    """All nonempty subsets of range(d), by size then lexicographically."""
    for k in range(1, d + 1):
        yield from itertools.combinations(range(d), k)


def compositions(total: int, d: int, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """Multiplicity vectors of length d summing to `total`, in lexicographic order.

    With `cap`, every entry is at most `cap`.
    """
    if d == 0:
        if total == 0:
            yield ()
        return
    hi = total if cap is None else min(cap, total)
    for first in range(hi + 1):
        rest = total - first
        if cap is not None and rest > cap * (d - 1):
            continue
        for tail in compositions(rest, d - 1, cap):
            yield (first,) + tail


def multiplicity_vectors(d: int, max_total: int, min_total: int = 0,
                         cap: int | None = None) -> Iterator[tuple[int, ...]]:
    for total in range(min_total, max_total + 1):
        yield from compositions(total, d, cap)


def restrict(K, S) -> KernelMatrix:
    """Principal submatrix of K on the sites S."""
    K = as_kernel(K)
    S = site_subset(S, K.dim)
    return KernelMatrix(K.entries[np.ix_(S, S)])


def fredholm_det(K, alpha) -> complex:
    """det(I + alpha K)."""
    K = as_kernel(K)
    a = as_alpha(alpha).value
    return complex(np.linalg.det(np.eye(K.dim) + a * K.entries))


def is_singular(det_value: complex, K_entries: np.ndarray, alpha: float) -> bool:
    """Whether det(I + alpha K) is numerically zero, relative to the scale of alpha K."""
    n = K_entries.shape[0]
    scale = 1.0 + abs(alpha) * np.linalg.norm(K_entries, 2)
    return abs(det_value) <= SINGULAR_TOL * scale ** n


def j_kernel(K, alpha, S=None) -> KernelMatrix:
    """J = K_S (I + alpha K_S)^-1 for the restriction of K to S (all sites by default).

    Raises SingularOperator when I + alpha K_S is not invertible.
    """
    K = as_kernel(K)
    a = as_alpha(alpha).value
    KS = K.entries if S is None else restrict(K, S).entries
    M = np.eye(KS.shape[0]) + a * KS
    if is_singular(np.linalg.det(M), KS, a):
        raise SingularOperator(f"I + alpha K_S is singular for S = {S}")
    # K_S commutes with (I + alpha K_S)^-1
    return KernelMatrix(np.linalg.solve(M, KS))


def block_expand(A, counts: Sequence[int]) -> np.ndarray:
    """A[n_1, ..., n_d]: row and column k of A repeated n_k times."""
    A = as_square_matrix(A)
    counts = np.asarray(counts, dtype=int)
    if counts.shape != (A.shape[0],) or np.any(counts < 0):
        raise ValueError("counts must be nonnegative, one per site")
    if counts.sum() == 0:
        raise EmptyExpansion("block expansion with zero total multiplicity")
    return np.repeat(np.repeat(A, counts, axis=0), counts, axis=1)


def block_alpha_det(A, counts, alpha) -> complex:
    """det_alpha(A[n]) (1 for n = 0)."""
    total = sum(counts)
    if total == 0:
        return 1.0 + 0j
    if total > EXPANSION_BOUND:
        raise DimensionTooLarge(f"total multiplicity {total} exceeds {EXPANSION_BOUND}")
    if total <= ENUM_TOTAL:
        return alpha_det_enum(block_expand(A, counts), alpha)
    return alpha_det_block(A, counts, alpha)


def expansion_coefficient(K, alpha, counts) -> complex:
    """Coefficient of prod z_k**n_k in det(I - alpha Z K)**(-1/alpha).

    Equal to det_alpha(K[n]) / prod n_k!.
    """
    K = as_kernel(K)
    counts = tuple(int(c) for c in counts)
    if len(counts) != K.dim:
        raise ValueError("one multiplicity per site required")
    denom = math.prod(math.factorial(c) for c in counts)
    return block_alpha_det(K.entries, counts, alpha) / denom


def expansion_table(K, alpha, order: int) -> list[tuple[tuple[int, ...], complex]]:
    """All expansion coefficients with total multiplicity <= order."""
    K = as_kernel(K)
    return [(n, expansion_coefficient(K, alpha, n))
            for n in multiplicity_vectors(K.dim, order)]


def expansion_radius(K, alpha, z) -> float:
    """Spectral radius of alpha Z K, Z = diag(z).

    The power series converges at z exactly when this is below 1 (for
    alpha = -1/m it is a polynomial and converges everywhere).
    """
    K = as_kernel(K)
    a = as_alpha(alpha).value
    ZK = np.asarray(z, dtype=complex)[:, None] * K.entries
    return float(np.abs(np.linalg.eigvals(a * ZK)).max())


def det_power(K, alpha, z) -> complex:
    """det(I - alpha Z K)**(-1/alpha) on the branch that is 1 at z = 0."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    z = np.asarray(z, dtype=complex)
    if z.shape != (K.dim,):
        raise ValueError("z must have one entry per site")
    M = ap.value * z[:, None] * K.entries
    if ap.kind is AlphaClass.NEG_RECIPROCAL_INT:
        return complex(np.linalg.det(np.eye(K.dim) - M) ** ap.m)
    mu = np.linalg.eigvals(M)
    if np.abs(mu).max() >= 1.0:
        raise OutsideConvergenceDomain(
            f"spectral radius of alpha Z K is {np.abs(mu).max():.6g} >= 1")
    # |mu| < 1 keeps 1 - mu in the right half plane, so the principal log
    # is the continuous branch along gamma z, 0 <= gamma <= 1
    return complex(np.exp(-np.log1p(-mu).sum() / ap.value))


def verify_expansion(K, alpha, z, order: int) -> float:
    """|det(I - alpha Z K)**(-1/alpha) - truncated series| at the point z.

    The series is summed over multiplicity vectors with total <= order using
    :func:`expansion_coefficient`. For alpha = -1/m the identity holds
    exactly once order >= m d.
    """
    K = as_kernel(K)
    z = np.asarray(z, dtype=complex)
    lhs = det_power(K, alpha, z)
    rhs = 0j
    for n, coef in expansion_table(K, alpha, order):
        rhs += coef * np.prod(z ** np.array(n))
    return float(abs(lhs - rhs))


def taylor_coefficients(func, degrees: Sequence[int], radius: float = 1.0) -> np.ndarray:
    """Taylor coefficients of an analytic function of d complex variables.

    Evaluates `func` on a torus of roots of unity and inverts with an FFT;
    exact (up to rounding) for polynomials with degree <= degrees[k] in
    variable k. Returns an array of shape ``[g + 1 for g in degrees]``.
    """
    shape = tuple(g + 1 for g in degrees)
    axes = [radius * np.exp(2j * np.pi * np.arange(s) / s) for s in shape]
    values = np.empty(shape, dtype=complex)
    for idx in np.ndindex(*shape):
        values[idx] = func(np.array([axes[k][i] for k, i in enumerate(idx)]))
    coef = np.fft.fftn(values) / values.size
    # fftn uses exp(-2 pi i jk/s), which is what inverts the evaluation grid
    powers = np.ones(shape)
    for k, s in enumerate(shape):
        r = radius ** np.arange(s, dtype=float)
        powers = powers * r.reshape([-1 if j == k else 1 for j in range(len(shape))])
    return coef / powers
