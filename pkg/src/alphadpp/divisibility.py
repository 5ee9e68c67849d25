"""Infinite divisibility of alpha-determinantal processes.

For alpha < 0 the process is never infinitely divisible. For alpha > 0 it
is iff det(I + alpha K_S) > 0 and every single-cycle sum of J_S[t] is
nonnegative, over subsets S and index tuples t. For real symmetric K the
cycle sums can be replaced by plain cycle products
J[t1, t2] J[t2, t3] ... J[tn, t1].
"""
from __future__ import annotations

import itertools

import numpy as np

from .alpha_det import AlphaParam, as_alpha, single_cycle_sums
from .errors import InvalidAlpha, NotRealSymmetric
from .existence import (
    COND_FREDHOLM,
    REJECT,
    Verdict,
    Witness,
    _check_size,
    _empty_reject,
    _fredholm_and_j,
    _positive_det,
    is_nonnegative,
    tolerance,
)
from .operators import as_kernel, nonempty_subsets

NEVER_DIVISIBLE = "NeverDivisible"
DIVISIBLE_UP_TO_BOUND = "DivisibleUpToBound"
DEFAULT_N_MAX = 5

COND_CYCLE_SUM = "single-cycle sums of J_S[t] >= 0"
COND_CYCLE_PRODUCT = "cycle products of J_S over t >= 0"


class DivisibilityVerdict(Verdict):
    @property
    def accepted(self) -> bool:
        return self.status == DIVISIBLE_UP_TO_BOUND


def necklaces(k: int, length: int) -> np.ndarray:
    """Index tuples over range(k) that are lexicographically minimal among their rotations."""
    tuples = np.array(list(itertools.product(range(k), repeat=length)), dtype=np.intp)
    tuples = tuples.reshape(-1, length)
    keep = np.ones(len(tuples), dtype=bool)
    for r in range(1, length):
        rot = np.roll(tuples, -r, axis=1)
        # keep rows with tuple <= rotation (lexicographic)
        diff = rot - tuples
        first = np.argmax(diff != 0, axis=1)
        sign = diff[np.arange(len(tuples)), first]
        keep &= sign >= 0
    return tuples[keep]


def _cycle_sums(J: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    return single_cycle_sums(J[tuples[:, :, None], tuples[:, None, :]])


def _cycle_products(J: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    nxt = np.roll(tuples, -1, axis=1)
    return J[tuples, nxt].prod(axis=1)


def _scan(K, ap: AlphaParam, n_max: int, evaluate, condition: str) -> DivisibilityVerdict:
    _check_size(K.dim)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    conditions = [COND_FREDHOLM, condition]
    if K.is_zero:
        v = _empty_reject(K, conditions)
        return DivisibilityVerdict(v.status, witness=v.witness,
                                   conditions_checked=v.conditions_checked, notes=v.notes)

    js = {}
    for S in nonempty_subsets(K.dim):
        det, J = _fredholm_and_j(K.entries[np.ix_(S, S)], ap.value)
        if J is None or not _positive_det(det):
            return DivisibilityVerdict(REJECT, n_max=n_max,
                                       witness=Witness(COND_FREDHOLM, S, det),
                                       conditions_checked=conditions)
        js[S] = J

    # shortest violating cycle first, then subsets in canonical order
    for length in range(1, n_max + 1):
        for S, J in js.items():
            tuples = necklaces(len(S), length)
            values = evaluate(J, tuples)
            tau = tolerance(J, length)
            bad = (values.real < -tau) | (np.abs(values.imag) > max(1e-9, tau))
            if bad.any():
                i = int(np.argmax(bad))
                cycle = tuple(S[j] for j in tuples[i])
                return DivisibilityVerdict(REJECT, n_max=n_max,
                                           witness=Witness(condition, S, complex(values[i]), cycle=cycle),
                                           conditions_checked=conditions)
    return DivisibilityVerdict(DIVISIBLE_UP_TO_BOUND, n_max=n_max, conditions_checked=conditions,
                               notes=[f"cycles checked up to length {n_max}"])


def _never(ap) -> DivisibilityVerdict:
    return DivisibilityVerdict(NEVER_DIVISIBLE, notes=[
        f"alpha = {ap.value:.12g} < 0: an N-th convolution root would need "
        "-1/(N alpha) to be an integer for every N"])


def check_divisible(K, alpha, n_max: int = DEFAULT_N_MAX) -> DivisibilityVerdict:
    """Infinite divisibility, with cycle sums checked up to length `n_max`."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if not ap.positive:
        return _never(ap)
    return _scan(K, ap, n_max, _cycle_sums, COND_CYCLE_SUM)


def check_divisible_symmetric(K, alpha, n_max: int = DEFAULT_N_MAX) -> DivisibilityVerdict:
    """Like :func:`check_divisible`, testing individual cycle products. Needs real symmetric K."""
    K = as_kernel(K)
    if not (K.is_real and K.hermitian):
        raise NotRealSymmetric("check_divisible_symmetric needs a real symmetric kernel")
    ap = as_alpha(alpha)
    if not ap.positive:
        return _never(ap)
    return _scan(K, ap, n_max, _cycle_products, COND_CYCLE_PRODUCT)


def nfold_component(K, alpha, N: int):
    """Kernel and alpha of the law whose N-fold convolution is the (K, alpha) law: (K/N, N alpha)."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if not ap.positive:
        raise InvalidAlpha("N-th convolution roots exist only for alpha > 0")
    if N < 1:
        raise ValueError("N must be a positive integer")
    return K.scaled(1.0 / N), as_alpha(N * ap.value)
