"""Alpha-determinants and cycle-restricted permutation sums.

For an n x n matrix A,

    det_alpha(A) = sum_{s in S_n} alpha**(n - cycles(s)) * prod_i A[i, s(i)]

so alpha = -1 is the ordinary determinant and alpha = 1 the permanent.
Two evaluators are provided: :func:`alpha_det_enum` walks every permutation
and serves as the reference, :func:`alpha_det_fast` uses an
inclusion-exclusion over principal submatrices and reaches larger n.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionTooLarge, InvalidAlpha, InvalidMatrix

ENUM_BOUND = 11
FAST_BOUND = 20
CYCLE_BOUND = 10

# permutation tables up to this size are materialised in one piece
_TABLE_N = 8
_RECIPROCAL_TOL = 1e-12
_CHUNK = 4096


class AlphaClass(enum.Enum):
    POSITIVE = "positive"
    NEG_RECIPROCAL_INT = "neg_reciprocal_int"
    NEG_OTHER = "neg_other"


@dataclass(frozen=True)
class AlphaParam:
    """A validated nonzero alpha together with its class.

    Use :meth:`from_value` rather than the constructor; it snaps values such
    that -1/alpha is within 1e-12 of a positive integer m to exactly -1/m.
    """

    value: float
    kind: AlphaClass
    m: int | None = None

    @classmethod
    def from_value(cls, value) -> "AlphaParam":
        if isinstance(value, AlphaParam):
            return value
        try:
            value = float(value)
        except (TypeError, ValueError) as exc:
            raise InvalidAlpha(f"alpha must be a real number, got {value!r}") from exc
        if not math.isfinite(value) or value == 0.0:
            raise InvalidAlpha(f"alpha must be finite and nonzero, got {value!r}")
        if value > 0:
            return cls(value, AlphaClass.POSITIVE)
        recip = -1.0 / value
        m = round(recip)
        if m >= 1 and abs(recip - m) <= _RECIPROCAL_TOL:
            return cls(-1.0 / m, AlphaClass.NEG_RECIPROCAL_INT, int(m))
        return cls(value, AlphaClass.NEG_OTHER)

    @property
    def positive(self) -> bool:
        return self.kind is AlphaClass.POSITIVE

    def to_dict(self) -> dict:
        out = {"value": self.value, "class": self.kind.value}
        if self.m is not None:
            out["m"] = self.m
        return out


def as_alpha(alpha) -> AlphaParam:
    return AlphaParam.from_value(alpha)


def as_square_matrix(A) -> np.ndarray:
    """Return `A` as a finite, nonempty, square complex array."""
    A = getattr(A, "entries", A)
    arr = np.asarray(A, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise InvalidMatrix("matrix must have at least one row")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix entries must be finite")
    return arr


def falling_factorial(a: float, n: int) -> float:
    """a (a - 1) ... (a - n + 1); 1 for n = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return float(math.prod(a - i for i in range(n)))


def ones_alpha_det(n: int, alpha: float) -> float:
    """Closed form of det_alpha of the n x n all-ones matrix."""
    alpha = as_alpha(alpha).value
    return float(math.prod(1.0 + j * alpha for j in range(n)))


# -- permutation enumeration ------------------------------------------------

@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    table = table.reshape(-1, n)
    table.setflags(write=False)
    return table


def _count_cycles(perms: np.ndarray) -> np.ndarray:
    """Number of cycles of each row of a batch of permutations.

    Element i starts a cycle iff it is the smallest element of its orbit.
    """
    k, n = perms.shape
    rows = np.arange(k)[:, None]
    cur = np.tile(np.arange(n), (k, 1))
    low = cur.copy()
    for _ in range(n - 1):
        cur = perms[rows, cur]
        np.minimum(low, cur, out=low)
    return np.count_nonzero(low == np.arange(n), axis=1)


@lru_cache(maxsize=None)
def _cycle_table(n: int) -> np.ndarray:
    cycles = _count_cycles(_perm_table(n))
    cycles.setflags(write=False)
    return cycles


def _binned(cycles: np.ndarray, products: np.ndarray, n: int) -> np.ndarray:
    re = np.bincount(cycles, weights=products.real, minlength=n + 1)
    im = np.bincount(cycles, weights=products.imag, minlength=n + 1)
    return re + 1j * im


def cycle_class_sums(A, bound: int = ENUM_BOUND) -> np.ndarray:
    """Sums of prod A[i, s(i)] over permutations grouped by cycle count.

    Returns an array ``c`` of length n + 1 with ``c[k]`` the sum over the
    permutations having exactly k cycles (``c[0]`` is always 0).
    """
    A = as_square_matrix(A)
    n = A.shape[0]
    if n > bound:
        raise DimensionTooLarge(f"enumeration limited to n <= {bound}, got n = {n}")
    if n <= _TABLE_N:
        perms = _perm_table(n)
        products = A[np.arange(n), perms].prod(axis=1)
        return _binned(_cycle_table(n), products, n)

    # Fix the images of the first p rows. Shortcutting those rows out of each
    # cycle leaves a permutation tau of the last 8 positions, and
    # cycles(s) = cycles(tau) + cycles closed inside the first p rows, so the
    # 8-table (indexed by tau) supplies the cycle counts.
    p = n - _TABLE_N
    tail = _perm_table(_TABLE_N)
    tail_cycles = _cycle_table(_TABLE_N)
    tail_rows = np.arange(p, n)
    out = np.zeros(n + 1, dtype=complex)
    for head in itertools.permutations(range(n), p):
        head_prod = math.prod(A[i, j] for i, j in enumerate(head))
        if head_prod == 0:
            continue
        closed = 0
        for i in range(p):
            j = head[i]
            while j < p and j != i:
                j = head[j]
            if j == i and i == min(_orbit(head, i)):
                closed += 1
        target = np.empty(_TABLE_N, dtype=np.intp)
        for v in set(range(n)).difference(head):
            u = v
            while u < p:
                u = head[u]
            target[u - p] = v
        products = head_prod * A[tail_rows, target[tail]].prod(axis=1)
        out += _binned(tail_cycles + closed, products, n)
    return out


def _orbit(head, i):
    out, j = [i], head[i]
    while j != i:
        out.append(j)
        j = head[j]
    return out


def alpha_det_enum(A, alpha, bound: int = ENUM_BOUND) -> complex:
    """det_alpha(A) by explicit enumeration of all n! permutations.

    This is the reference evaluator; it refuses n > `bound` (default 11).

    >>> alpha_det_enum([[1, 1, 1]] * 3, 1)
    (6+0j)
    """
    a = as_alpha(alpha).value
    sums = cycle_class_sums(A, bound=bound)
    n = len(sums) - 1
    weights = np.array([a ** (n - k) for k in range(n + 1)])
    return complex(np.dot(weights, sums))


# -- inclusion-exclusion evaluator ------------------------------------------

def _top_coefficients(mats: np.ndarray, order: int, alpha: float) -> np.ndarray:
    """[t**order] det(I - alpha t M)**(-1/alpha) for each M in a stack.

    Uses the power sums p_j = tr(M**j) and the recurrence
    k g_k = sum_j alpha**(j-1) p_j g_{k-j}.
    """
    eig = np.linalg.eigvals(mats)
    power = np.ones_like(eig)
    h = []
    for j in range(1, order + 1):
        power = power * eig
        h.append(alpha ** (j - 1) * power.sum(axis=-1))
    g = [np.ones(mats.shape[0], dtype=complex)]
    for k in range(1, order + 1):
        acc = sum(h[j - 1] * g[k - j] for j in range(1, k + 1))
        g.append(acc / k)
    return g[order]


def _batched(iterable, size):
    it = iter(iterable)
    while batch := list(itertools.islice(it, size)):
        yield batch


def alpha_det_fast(A, alpha, bound: int = FAST_BOUND) -> complex:
    """det_alpha(A) in O(2**n n**3) time.

    det_alpha(A) is the coefficient of z_1 ... z_n in
    det(I - alpha Z A)**(-1/alpha), Z = diag(z). Inclusion-exclusion over
    the support S of z reduces that to univariate coefficients of principal
    submatrices A_S, each obtained from its eigenvalues.
    """
    A = as_square_matrix(A)
    a = as_alpha(alpha).value
    n = A.shape[0]
    if n > bound:
        raise DimensionTooLarge(f"fast evaluator limited to n <= {bound}, got n = {n}")
    total = 0j
    for k in range(1, n + 1):
        sign = -1.0 if (n - k) % 2 else 1.0
        for batch in _batched(itertools.combinations(range(n), k), _CHUNK):
            idx = np.array(batch, dtype=np.intp)
            subs = A[idx[:, :, None], idx[:, None, :]]
            total += sign * _top_coefficients(subs, n, a).sum()
    return complex(total)


def alpha_det_block(A, counts, alpha, max_terms: int = 1 << 20) -> complex:
    """det_alpha(A[n_1, ..., n_d]) without forming the expanded matrix.

    A principal submatrix of the block expansion that keeps s_k copies of
    site k has the same nonzero spectrum as diag(s) A, so the subsets of the
    inclusion-exclusion collapse to count vectors 0 <= s <= n weighted by
    prod_k binom(n_k, s_k).
    """
    A = as_square_matrix(A)
    a = as_alpha(alpha).value
    counts = tuple(int(c) for c in counts)
    if len(counts) != A.shape[0] or min(counts) < 0:
        raise ValueError("counts must be nonnegative with one entry per row of A")
    total_n = sum(counts)
    if total_n == 0:
        return 1.0 + 0j
    n_terms = math.prod(c + 1 for c in counts)
    if n_terms > max_terms:
        raise DimensionTooLarge(f"{n_terms} inclusion-exclusion terms exceed {max_terms}")
    total = 0j
    grid = itertools.product(*(range(c + 1) for c in counts))
    for batch in _batched(grid, _CHUNK):
        s = np.array(batch, dtype=float)
        weight = np.prod([[math.comb(c, int(v)) for c, v in zip(counts, row)] for row in batch],
                         axis=1).astype(float)
        weight *= np.where((total_n - s.sum(axis=1)) % 2, -1.0, 1.0)
        mats = s[:, :, None] * A[None, :, :]
        total += np.dot(weight, _top_coefficients(mats, total_n, a))
    return complex(total)


def alpha_det(A, alpha) -> complex:
    """det_alpha(A), by enumeration for n <= 8 and inclusion-exclusion above."""
    A = as_square_matrix(A)
    if A.shape[0] <= _TABLE_N:
        return alpha_det_enum(A, alpha)
    return alpha_det_fast(A, alpha)


# -- single cycles ------------------------------------------------------------

def single_cycle_sums(mats, bound: int = CYCLE_BOUND) -> np.ndarray:
    """Vectorised :func:`single_cycle_sum` over a stack of n x n matrices."""
    mats = np.asarray(mats, dtype=complex)
    n = mats.shape[-1]
    if n > bound:
        raise DimensionTooLarge(f"cycle enumeration limited to n <= {bound}, got n = {n}")
    if n == 1:
        return mats[:, 0, 0].copy()
    # every full cycle is 0 -> q_0 -> ... -> q_{n-2} -> 0 for a unique ordering q
    order = np.empty((math.factorial(n - 1), n), dtype=np.intp)
    order[:, 0] = 0
    order[:, 1:] = _perm_table(n - 1) + 1
    nxt = np.roll(order, -1, axis=1)
    edges = mats[:, order, nxt]
    return edges.prod(axis=-1).sum(axis=-1)


def single_cycle_sum(A, bound: int = CYCLE_BOUND) -> complex:
    """Sum of prod A[i, s(i)] over the (n-1)! permutations that are one cycle."""
    A = as_square_matrix(A)
    return complex(single_cycle_sums(A[None], bound=bound)[0])
