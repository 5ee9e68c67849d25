"""Exact law, sampling and Monte Carlo validation on a finite ground space.

The law of the multiplicity vector xi = (xi_0, ..., xi_{d-1}) is

    P(xi = n) = det(I + alpha K)**(-1/alpha) det_alpha(J[n]) / prod n_k!

with J = K (I + alpha K)^-1. For alpha = -1/m every site holds at most m
points, so the support is finite; for alpha > 0 the table is truncated once
it captures the requested probability mass.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .alpha_det import AlphaClass, as_alpha
from .errors import NegativeWeight, NonRealWeight, SingularOperator, TruncationFailure
from .operators import (
    as_kernel,
    block_alpha_det,
    compositions,
    fredholm_det,
    is_singular,
    j_kernel,
    multiplicity_vectors,
)

DEFAULT_MASS_TARGET = 1.0 - 1e-9
MAX_TOTAL = 60
MAX_ENTRIES = 2_000_000
IMAG_TOL = 1e-9
WEIGHT_TOL = 1e-9


@dataclass
class PmfTable:
    """Probabilities of multiplicity vectors, listed by increasing total."""

    entries: dict
    captured_mass: float
    exact_support: bool
    dim: int

    def __getitem__(self, n) -> float:
        return self.entries.get(tuple(n), 0.0)

    def vectors(self) -> np.ndarray:
        return np.array(list(self.entries), dtype=np.int64).reshape(-1, self.dim)

    def probabilities(self) -> np.ndarray:
        return np.fromiter(self.entries.values(), dtype=float, count=len(self.entries))


@dataclass
class SampleBatch:
    seed: int
    draws: np.ndarray
    bias_bound: float = 0.0

    @property
    def count(self) -> int:
        return len(self.draws)


def _fredholm_prefactor(K, ap) -> float:
    D = fredholm_det(K, ap)
    if is_singular(D, K.entries, ap.value):
        raise SingularOperator("I + alpha K is singular")
    if ap.kind is AlphaClass.NEG_RECIPROCAL_INT:
        value = D ** ap.m
    else:
        value = complex(D) ** (-1.0 / ap.value)
    if abs(value.imag) > IMAG_TOL * max(1.0, abs(value)):
        raise NonRealWeight(f"det(I + alpha K)**(-1/alpha) = {value} is not real")
    return float(value.real)


def _as_weight(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise NonRealWeight(f"{what} = {value} is not real")
    return float(value.real)


def janossy_weight(K, alpha, n) -> float:
    """P(xi = n) from the alpha-determinant of the block-expanded J."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    n = tuple(int(c) for c in n)
    if len(n) != K.dim:
        raise ValueError("one multiplicity per site required")
    pref = _fredholm_prefactor(K, ap)
    J = j_kernel(K, ap).entries
    coef = block_alpha_det(J, n, ap.value) / math.prod(math.factorial(c) for c in n)
    return _as_weight(pref * coef, f"weight of {n}")


def _principal_minor_terms(J: np.ndarray, alpha: float):
    """Nonzero terms of det(I - alpha Z J) as (support mask, coefficient)."""
    d = J.shape[0]
    terms = []
    for k in range(1, d + 1):
        for T in itertools.combinations(range(d), k):
            coef = (-alpha) ** k * np.linalg.det(J[np.ix_(T, T)])
            mask = np.zeros(d, dtype=np.int64)
            mask[list(T)] = 1
            terms.append((mask, k, complex(coef)))
    return terms


def pmf_table(K, alpha, mass_target: float = DEFAULT_MASS_TARGET,
              max_total: int = MAX_TOTAL) -> PmfTable:
    """Exact probabilities of multiplicity vectors, by increasing total.

    The probabilities are the Taylor coefficients of the generating function
    det(I + alpha K)**(-1/alpha) det(I - alpha Z J)**(-1/alpha). The second
    factor is P(z)**g with P multilinear and g = -1/alpha; writing E for the
    Euler operator sum z_k d/dz_k, the identity P E(P**g) = g E(P) P**g gives

        |n| c_n = sum_T p_T c_{n - T} (g |T| - |n| + |T|)

    over the supports T of the terms p_T of P.
    """
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if not 0.0 < mass_target <= 1.0:
        raise ValueError("mass_target must lie in (0, 1]")
    d = K.dim
    a = ap.value
    gamma = -1.0 / a
    exact = ap.kind is AlphaClass.NEG_RECIPROCAL_INT
    cap = ap.m if exact else None
    pref = _fredholm_prefactor(K, ap)
    if pref < -WEIGHT_TOL:
        raise NegativeWeight(f"P(xi = 0) = {pref:.6g} < 0")
    J = j_kernel(K, ap).entries
    terms = _principal_minor_terms(J, a)

    zero = (0,) * d
    coef = {zero: 1.0 + 0j}
    entries = {zero: max(pref, 0.0)}
    mass = entries[zero]
    total = 0
    while True:
        if exact:
            if total >= cap * d:
                break
        elif mass >= mass_target:
            break
        total += 1
        if total > max_total or len(entries) > MAX_ENTRIES:
            raise TruncationFailure(
                f"captured mass {mass:.12g} < {mass_target} with totals up to {total - 1}")
        for n in compositions(total, d, cap):
            arr = np.array(n)
            acc = 0j
            for mask, size, p in terms:
                prev = arr - mask
                if prev.min() < 0:
                    continue
                c = coef.get(tuple(prev))
                if c is None:
                    continue
                acc += p * c * (gamma * size - total + size)
            c_n = acc / total
            coef[n] = c_n
            prob = pref * c_n
            if abs(prob.imag) > IMAG_TOL:
                raise NonRealWeight(f"P(xi = {n}) = {prob} is not real")
            if prob.real < -WEIGHT_TOL:
                raise NegativeWeight(f"P(xi = {n}) = {prob.real:.6g} < 0")
            p_real = max(prob.real, 0.0)
            entries[n] = p_real
            mass += p_real
    return PmfTable(entries, mass, exact, d)


def pgf(K, alpha, z) -> float:
    """E[prod z_k**xi_k] = det(I + alpha diag(1 - z) K)**(-1/alpha)."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    z = np.asarray(z, dtype=float)
    if z.shape != (K.dim,):
        raise ValueError("z must have one entry per site")
    M = (1.0 - z)[:, None] * K.entries
    D = complex(np.linalg.det(np.eye(K.dim) + ap.value * M))
    if is_singular(D, M, ap.value):
        raise SingularOperator("I + alpha diag(1 - z) K is singular")
    if ap.kind is AlphaClass.NEG_RECIPROCAL_INT:
        value = D ** ap.m
    else:
        value = D ** (-1.0 / ap.value)
    return _as_weight(value, "p.g.f. value")


def _draw(table: PmfTable, count: int, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(table.probabilities())
    u = rng.random(count) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    return table.vectors()[idx]


def sample(K, alpha, count: int, seed: int = 0,
           mass_target: float = DEFAULT_MASS_TARGET) -> SampleBatch:
    """`count` i.i.d. draws by inverse CDF over :func:`pmf_table`.

    A truncated table is renormalised; `bias_bound` is the missing mass.
    """
    table = pmf_table(K, alpha, mass_target)
    rng = np.random.default_rng(seed)
    draws = _draw(table, count, rng)
    return SampleBatch(seed, draws, max(0.0, 1.0 - table.captured_mass))


def superpose_sample(K, m: int, count: int, seed: int = 0) -> SampleBatch:
    """Sum of m independent determinantal (alpha = -1) draws with kernel K/m.

    Has the law of the alpha = -1/m process with kernel K.
    """
    K = as_kernel(K)
    if m < 1:
        raise ValueError("m must be a positive integer")
    table = pmf_table(K.scaled(1.0 / m), -1.0)
    rng = np.random.default_rng(seed)
    draws = _draw(table, count * m, rng).reshape(count, m, K.dim).sum(axis=1)
    return SampleBatch(seed, draws, 0.0)


def factorial_moment(K, alpha, n) -> float:
    """E[prod_k xi_k (xi_k - 1) ... (xi_k - n_k + 1)] = det_alpha(K[n])."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    n = tuple(int(c) for c in n)
    if len(n) != K.dim:
        raise ValueError("one multiplicity per site required")
    return _as_weight(block_alpha_det(K.entries, n, ap.value), f"factorial moment {n}")


def empirical_factorial_moment(draws: np.ndarray, n) -> tuple[float, float]:
    """Sample mean and standard error of prod_k xi_k^(n_k)."""
    draws = np.asarray(draws)
    values = np.ones(len(draws))
    for k, nk in enumerate(n):
        values *= falling_factorial_array(draws[:, k], nk)
    se = values.std(ddof=1) / math.sqrt(len(values)) if len(values) > 1 else math.inf
    return float(values.mean()), float(se)


def falling_factorial_array(x: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(len(x))
    for i in range(n):
        out *= x - i
    return out


def validate_moments(batch: SampleBatch, K, alpha, max_total: int = 3,
                     n_sigma: float = 3.0) -> dict:
    """Compare empirical factorial moments with det_alpha(K[n]) for 1 <= |n| <= max_total.

    A moment passes when it lies within `n_sigma` standard errors; moments
    with zero sample variance must match to 1e-12.
    """
    K = as_kernel(K)
    rows = []
    for n in multiplicity_vectors(K.dim, max_total, min_total=1):
        exact = factorial_moment(K, alpha, n)
        mean, se = empirical_factorial_moment(batch.draws, n)
        ok = abs(mean - exact) <= n_sigma * se if se > 0 else abs(mean - exact) <= 1e-12
        rows.append({"n": list(n), "exact": exact, "empirical": mean,
                     "stderr": se, "passed": bool(ok)})
    return {"count": batch.count, "n_sigma": n_sigma,
            "passed": all(r["passed"] for r in rows), "moments": rows}


def thin(batch: SampleBatch, p: float, seed: int = 0) -> SampleBatch:
    """Keep every point independently with probability p."""
    if not 0.0 < p < 1.0:
        raise ValueError("retention probability must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    return SampleBatch(seed, rng.binomial(batch.draws, p), batch.bias_bound)


def convolve(a: PmfTable, b: PmfTable) -> dict:
    """Law of the sum of independent draws from two tables."""
    out: dict = {}
    for n, p in a.entries.items():
        for k, q in b.entries.items():
            key = tuple(x + y for x, y in zip(n, k))
            out[key] = out.get(key, 0.0) + p * q
    return out


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
