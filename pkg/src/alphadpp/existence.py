"""Existence checks for alpha-determinantal processes on a finite space.

alpha > 0
    The process exists iff det(I + alpha K_S) > 0 and every
    det_alpha(J_S[n]) >= 0, over all site subsets S and all multiplicity
    vectors n on S. The second family is infinite, so acceptance is only ever
    up to a total multiplicity bound.
alpha < 0
    -1/alpha must be a positive integer m. With every I + alpha K_S
    invertible, nonnegativity of the principal minors of each J_S is a
    finite and exact certificate. If some I + alpha K_S is singular, the
    same minor test is run for J_beta on a grid of beta in (alpha, 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alpha_det import AlphaClass, ones_alpha_det, as_alpha
from .errors import DimensionTooLarge, InvalidAlpha, NotHermitian
from .operators import (
    as_kernel,
    block_alpha_det,
    is_singular,
    multiplicity_vectors,
    nonempty_subsets,
)

ACCEPT_EXACT = "AcceptExact"
ACCEPT_UP_TO_BOUND = "AcceptUpToBound"
REJECT = "Reject"

SUBSET_BOUND = 12
DEFAULT_N_MAX = 6
IMAG_TOL = 1e-9
SPECTRAL_MARGIN = 1e-9

COND_NONZERO = "kernel is not identically zero"
COND_FREDHOLM = "det(I + alpha K_S) > 0"
COND_ALPHA_DET = "det_alpha(J_S[n]) >= 0"
COND_SPECTRAL = "Re spectrum(K_S) > -1/(2 alpha)"
COND_RECIPROCAL = "-1/alpha is a positive integer"
COND_MINORS = "principal minors of J_S >= 0"
COND_BETA_MINORS = "principal minors of J_beta_S >= 0 for beta in (alpha, 0)"
COND_SPECTRUM = "spectrum(K) in [0, -1/alpha]"

EMPTY_NOTE = "the almost surely empty process is excluded"


@dataclass(frozen=True)
class Witness:
    """Where a condition failed: sites, the configuration, and the offending value."""

    condition: str
    subset: tuple[int, ...]
    value: complex
    multiplicity: tuple[int, ...] | None = None
    cycle: tuple[int, ...] | None = None
    beta: float | None = None

    def to_dict(self) -> dict:
        out = {
            "condition": self.condition,
            "subset": list(self.subset),
            "value": {"re": float(np.real(self.value)), "im": float(np.imag(self.value))},
        }
        if self.multiplicity is not None:
            out["multiplicity"] = list(self.multiplicity)
        if self.cycle is not None:
            out["cycle"] = list(self.cycle)
        if self.beta is not None:
            out["beta"] = self.beta
        return out


@dataclass
class Verdict:
    status: str
    n_max: int | None = None
    witness: Witness | None = None
    conditions_checked: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.status in (ACCEPT_EXACT, ACCEPT_UP_TO_BOUND)

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.n_max is not None:
            out["n_max"] = self.n_max
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        out["conditions_checked"] = list(self.conditions_checked)
        out["notes"] = list(self.notes)
        return out


def tolerance(J: np.ndarray, n: int) -> float:
    """Scale-aware slack for nonnegativity of degree-n polynomials in J."""
    scale = float(np.abs(J).max()) if J.size else 0.0
    return 1e-9 * (1.0 + scale) ** n


def is_nonnegative(value: complex, tau: float) -> bool:
    """Real within IMAG_TOL-relative slack and >= -tau."""
    return abs(value.imag) <= max(IMAG_TOL, tau) and value.real >= -tau


def _check_size(d: int):
    if d > SUBSET_BOUND:
        raise DimensionTooLarge(f"subset enumeration limited to d <= {SUBSET_BOUND}, got {d}")


def _empty_reject(K, conditions) -> Verdict:
    return Verdict(REJECT,
                   witness=Witness(COND_NONZERO, tuple(range(K.dim)), 0j),
                   conditions_checked=conditions + [COND_NONZERO],
                   notes=[EMPTY_NOTE])


def _fredholm_and_j(KS: np.ndarray, alpha: float):
    """det(I + alpha K_S) and J_S, or None for J_S when singular."""
    M = np.eye(KS.shape[0]) + alpha * KS
    det = complex(np.linalg.det(M))
    if is_singular(det, KS, alpha):
        return det, None
    return det, np.linalg.solve(M, KS)


def _positive_det(det: complex) -> bool:
    return det.real > 0 and abs(det.imag) <= IMAG_TOL * max(1.0, abs(det))


# -- alpha > 0 ---------------------------------------------------------------

def spectral_violation(K, alpha):
    """First (subset, eigenvalue) with Re eigenvalue <= -1/(2 alpha), or None."""
    K = as_kernel(K)
    a = as_alpha(alpha).value
    _check_size(K.dim)
    bound = -1.0 / (2.0 * a) - SPECTRAL_MARGIN
    for S in nonempty_subsets(K.dim):
        eig = np.linalg.eigvals(K.entries[np.ix_(S, S)])
        bad = eig[eig.real <= bound]
        if bad.size:
            return S, complex(bad[np.argmin(bad.real)])
    return None


def spectral_check(K, alpha) -> bool:
    """Necessary condition for alpha > 0: every K_S has spectrum in Re z > -1/(2 alpha)."""
    ap = as_alpha(alpha)
    if not ap.positive:
        raise InvalidAlpha("spectral_check needs alpha > 0")
    return spectral_violation(K, ap) is None


def check_positive_alpha(K, alpha, n_max: int = DEFAULT_N_MAX) -> Verdict:
    """Existence test for alpha > 0, truncated at total multiplicity `n_max`.

    Subsets are scanned by size then lexicographically, multiplicity vectors
    by total then lexicographically; the first violation is the witness.
    When the scan finds nothing but the spectral necessary condition fails,
    the kernel is still rejected, with the eigenvalue as witness.
    """
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if not ap.positive:
        raise InvalidAlpha("check_positive_alpha needs alpha > 0")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_size(K.dim)
    a = ap.value
    conditions = [COND_FREDHOLM, COND_ALPHA_DET]
    if K.is_zero:
        return _empty_reject(K, conditions)

    spectral = spectral_violation(K, ap)
    js = {}
    for S in nonempty_subsets(K.dim):
        det, J = _fredholm_and_j(K.entries[np.ix_(S, S)], a)
        if J is None or not _positive_det(det):
            return Verdict(REJECT, n_max=n_max,
                           witness=Witness(COND_FREDHOLM, S, det),
                           conditions_checked=conditions)
        js[S] = J

    for S, J in js.items():
        for local in multiplicity_vectors(len(S), n_max, min_total=1):
            value = block_alpha_det(J, local, a)
            if not is_nonnegative(value, tolerance(J, sum(local))):
                counts = [0] * K.dim
                for site, c in zip(S, local):
                    counts[site] = c
                notes = []
                if spectral is not None:
                    notes.append("spectral necessary condition also fails")
                return Verdict(REJECT, n_max=n_max,
                               witness=Witness(COND_ALPHA_DET, S, value, multiplicity=tuple(counts)),
                               conditions_checked=conditions, notes=notes)

    if spectral is not None:
        S, eig = spectral
        return Verdict(REJECT, n_max=n_max,
                       witness=Witness(COND_SPECTRAL, S, eig),
                       conditions_checked=conditions + [COND_SPECTRAL],
                       notes=[f"flagged: no negative weight up to total {n_max}, "
                              "rejected by the spectral necessary condition"])
    return Verdict(ACCEPT_UP_TO_BOUND, n_max=n_max,
                   conditions_checked=conditions + [COND_SPECTRAL],
                   notes=[f"weights checked up to total multiplicity {n_max}; "
                          "no finite certificate exists for alpha > 0"])


# -- alpha < 0 ---------------------------------------------------------------

def principal_minor_violation(J: np.ndarray):
    """First principal minor of J (by size, then lexicographic) that is negative or non-real.

    Returns (local index subset, minor) or None.
    """
    J = np.asarray(J, dtype=complex)
    n = J.shape[0]
    for T in nonempty_subsets(n):
        minor = complex(np.linalg.det(J[np.ix_(T, T)]))
        if not is_nonnegative(minor, tolerance(J, len(T))):
            return T, minor
    return None


def beta_grid(alpha: float) -> list[float]:
    """Sample points of (alpha, 0): alpha (1 - 2**-j) for j = 1..10, plus alpha / 2 and alpha / 4."""
    grid = {alpha * (1.0 - 2.0 ** -j) for j in range(1, 11)} | {alpha / 2, alpha / 4}
    return sorted(grid, reverse=True)


def _reciprocal_reject(ap) -> Verdict:
    # det_alpha of the all-ones matrix turns negative at the first factor 1 + j alpha < 0
    n = int(np.floor(-1.0 / ap.value)) + 2
    value = ones_alpha_det(n, ap.value)
    return Verdict(REJECT,
                   witness=Witness(COND_RECIPROCAL, (), complex(value), multiplicity=(n,)),
                   conditions_checked=[COND_RECIPROCAL],
                   notes=[f"det_alpha of the {n} x {n} all-ones matrix is {value:.6g} < 0, "
                          "independently of K"])


def _minor_scan(K, beta: float, condition: str):
    """Witness for the minor test of J_beta over all subsets, or None."""
    for S in nonempty_subsets(K.dim):
        det, J = _fredholm_and_j(K.entries[np.ix_(S, S)], beta)
        if J is None:
            return Witness(COND_FREDHOLM, S, det, beta=beta)
        bad = principal_minor_violation(J)
        if bad is not None:
            T, minor = bad
            return Witness(condition, tuple(S[i] for i in T), minor, beta=beta)
    return None


def check_negative_alpha(K, alpha) -> Verdict:
    """Exact existence test for alpha < 0."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if ap.positive:
        raise InvalidAlpha("check_negative_alpha needs alpha < 0")
    _check_size(K.dim)
    if ap.kind is AlphaClass.NEG_OTHER:
        return _reciprocal_reject(ap)
    conditions = [COND_RECIPROCAL, COND_MINORS]
    if K.is_zero:
        return _empty_reject(K, conditions)
    a = ap.value

    singular = []
    for S in nonempty_subsets(K.dim):
        det, J = _fredholm_and_j(K.entries[np.ix_(S, S)], a)
        if J is None:
            singular.append(S)
            continue
        bad = principal_minor_violation(J)
        if bad is not None:
            T, minor = bad
            return Verdict(REJECT, witness=Witness(COND_MINORS, tuple(S[i] for i in T), minor),
                           conditions_checked=conditions)
    if not singular:
        return Verdict(ACCEPT_EXACT, conditions_checked=conditions)

    grid = beta_grid(a)
    conditions = [COND_RECIPROCAL, COND_BETA_MINORS]
    notes = [f"I + alpha K_S singular for S = {list(singular[0])}; "
             f"minors of J_beta checked on beta grid {[round(b, 12) for b in grid]}"]
    for beta in grid:
        w = _minor_scan(K, beta, COND_BETA_MINORS)
        if w is not None:
            return Verdict(REJECT, witness=w, conditions_checked=conditions, notes=notes)
    return Verdict(ACCEPT_EXACT, conditions_checked=conditions, notes=notes)


def check_selfadjoint(K, alpha) -> Verdict:
    """Existence for hermitian K and alpha < 0: the spectrum of K must lie in [0, -1/alpha]."""
    K = as_kernel(K)
    ap = as_alpha(alpha)
    if not K.hermitian:
        raise NotHermitian("check_selfadjoint needs a hermitian kernel")
    if ap.positive:
        raise InvalidAlpha("check_selfadjoint needs alpha < 0")
    if ap.kind is AlphaClass.NEG_OTHER:
        return _reciprocal_reject(ap)
    conditions = [COND_RECIPROCAL, COND_SPECTRUM]
    if K.is_zero:
        return _empty_reject(K, conditions)
    m = ap.m
    eig = np.linalg.eigvalsh(K.entries)
    tau = 1e-9 * (1.0 + float(np.abs(K.entries).max()))
    outside = eig[(eig < -tau) | (eig > m + tau)]
    if outside.size:
        worst = outside[np.argmax(np.maximum(-outside, outside - m))]
        return Verdict(REJECT, witness=Witness(COND_SPECTRUM, tuple(range(K.dim)), complex(worst)),
                       conditions_checked=conditions)
    return Verdict(ACCEPT_EXACT, conditions_checked=conditions)


def check_existence(K, alpha, n_max: int = DEFAULT_N_MAX) -> Verdict:
    """Dispatch on the sign of alpha."""
    ap = as_alpha(alpha)
    if ap.positive:
        return check_positive_alpha(K, ap, n_max)
    return check_negative_alpha(K, ap)


def scaled_equivalence(K, m: int) -> bool:
    """Whether the alpha = -1/m test on K and the alpha = -1 test on K/m agree."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    K = as_kernel(K)
    left = check_negative_alpha(K, -1.0 / m)
    right = check_negative_alpha(K.scaled(1.0 / m), -1.0)
    return left.status == right.status
