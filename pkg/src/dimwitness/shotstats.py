"""Shot-noise statistics for witness estimates.

Measured frequencies fluctuate binomially around the true probabilities:
``Var(p~_j) = b_j / N_j`` with ``b_j = p_j (1 - p_j)``.  Propagating those
fluctuations through a witness F to second order gives

    shift     <dF>     = sum_j  d2F/dp_j^2 * b_j / (2 N_j)
    variance  <dF^2>   = sum_j (dF/dp_j)^2 * b_j / N_j
              + second = sum_ij (d2F/dp_i dp_j)^2 * b_i b_j / (2 N_i N_j)

The second-order variance matters precisely because the witnesses are null
tests: at the ideal sequences their gradients vanish.  Closed forms for the
W(N), F1, F2 variances are provided alongside the generic evaluation, plus
the third-cumulant cross term with its suppression bound, an exact binomial
sampler, and a Monte Carlo helper for end-to-end checks.

Shot counts may be passed as a scalar, a per-index array, or ``np.inf`` to
represent exact (infinite-statistics) probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SequenceLengthError, adjugate, toeplitz_from_differences
from .witnesses import (
    WitnessKind,
    witness_gradient,
    witness_hessian,
    witness_value,
)

_MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class ShotCounts:
    """Per-index success counts n_j out of N_j shots."""

    successes: np.ndarray
    shots: np.ndarray

    def __post_init__(self):
        n = np.atleast_1d(np.asarray(self.successes, dtype=np.int64))
        total = np.atleast_1d(np.asarray(self.shots, dtype=np.int64))
        if n.shape != total.shape:
            raise ValueError("successes and shots must have matching shapes")
        if np.any(total <= 0):
            raise ValueError("every shot total must be positive")
        if np.any(n < 0) or np.any(n > total):
            raise ValueError("successes must satisfy 0 <= n_j <= N_j")
        object.__setattr__(self, "successes", n)
        object.__setattr__(self, "shots", total)

    def __len__(self) -> int:
        return len(self.successes)


def empirical_probs(counts: ShotCounts) -> np.ndarray:
    """Measured frequencies p~_j = n_j / N_j."""
    return counts.successes / counts.shots


def binomial_variances(p) -> np.ndarray:
    """b_j = p_j (1 - p_j), clamped to be nonnegative."""
    arr = np.asarray(p, dtype=float)
    return np.maximum(arr * (1.0 - arr), 0.0)


def _shots_array(shots, length: int) -> np.ndarray:
    arr = np.asarray(shots, dtype=float)
    if arr.ndim == 0:
        arr = np.full(length, float(arr))
    if arr.shape != (length,):
        raise ValueError(f"need one shot count per index ({length}), got shape {arr.shape}")
    if np.any(arr <= 0):
        raise ValueError("shot counts must be positive")
    return arr


def delta_shift(kind: WitnessKind, p, shots) -> float:
    """First-order bias of the witness estimate, evaluated at the measured
    frequencies: sum_j d2F/dp_j^2 * b_j / (2 N_j)."""
    q = np.asarray(p, dtype=float)[: kind.required_length]
    n = _shots_array(shots, kind.required_length)
    h = witness_hessian(kind, q)
    b = binomial_variances(q)
    return float(np.sum(np.diag(h) * b / (2.0 * n)))


def delta_variance(kind: WitnessKind, p, shots) -> float:
    """First-order variance: sum_j (dF/dp_j)^2 * b_j / N_j."""
    q = np.asarray(p, dtype=float)[: kind.required_length]
    n = _shots_array(shots, kind.required_length)
    g = witness_gradient(kind, q)
    b = binomial_variances(q)
    return float(np.sum(g * g * b / n))


def second_order_variance(kind: WitnessKind, p, shots) -> float:
    """Quadratic-fluctuation variance sum_ij H_ij^2 b_i b_j / (2 N_i N_j);
    the dominant term when the gradient vanishes at a null point."""
    q = np.asarray(p, dtype=float)[: kind.required_length]
    n = _shots_array(shots, kind.required_length)
    h = witness_hessian(kind, q)
    w = binomial_variances(q) / n
    return float(0.5 * np.sum((h * h) * np.outer(w, w)))


@dataclass(frozen=True)
class ThirdCumulantTerm:
    """Cross term of shift and curvature, with its suppression bound.

    ``value`` is sum_i H_ii g_i t_i / N_i^2 with t_i = p_i(1-p_i)(1-2p_i);
    ``bound`` applies 2ab <= a^2 + b^2 termwise, showing the cross term is
    smaller than the retained variance terms by ~ N_i^(-1/2).
    """

    value: float
    bound: float


def third_cumulant_term(kind: WitnessKind, p, shots) -> ThirdCumulantTerm:
    q = np.asarray(p, dtype=float)[: kind.required_length]
    n = _shots_array(shots, kind.required_length)
    g = witness_gradient(kind, q)
    hdiag = np.diag(witness_hessian(kind, q))
    b = binomial_variances(q)
    t = b * (1.0 - 2.0 * q)
    value = float(np.sum(hdiag * g * t / n**2))
    a_sq = g * g * b / n                       # first-order variance terms
    b_sq = hdiag * hdiag * b * (1.0 - 2.0 * q) ** 2 / n**2
    bound = float(np.sum((a_sq + b_sq) / (2.0 * np.sqrt(n))))
    return ThirdCumulantTerm(value, bound)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def _equal_shots(shots, what: str) -> float:
    arr = np.asarray(shots, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    if np.any(arr != arr.flat[0]):
        raise ValueError(
            f"{what} assumes equal shots per index; use delta_variance for "
            "per-index shot counts"
        )
    return float(arr.flat[0])


def variance_WN_closed(p, n: int, shots) -> float:
    """First-order W(N) variance from adjugate anti-diagonal differences:

        sum_i b_i ( sum_j Adj[j, i-j] - Adj[j-1, i-j] )^2 / N_shots

    Adjugate indices outside the matrix count as zero.  The 1/N_shots factor
    makes this identical to ``delta_variance`` for equal per-index shots.
    """
    q = np.asarray(p, dtype=float)
    if len(q) < 2 * n:
        raise SequenceLengthError(2 * n, len(q), what=f"W({n}) variance")
    q = q[: 2 * n]
    n_shots = _equal_shots(shots, "variance_WN_closed")
    adj = np.asarray(adjugate(toeplitz_from_differences(q, n)), dtype=float)

    def at(row, col):
        if 0 <= row < n and 0 <= col < n:
            return adj[row, col]
        return 0.0

    b = binomial_variances(q)
    total = 0.0
    for i in range(2 * n):
        inner = sum(at(j, i - j) - at(j - 1, i - j) for j in range(n + 1))
        total += b[i] * inner * inner
    return total / n_shots


def variance_F1_closed(p, shots) -> float:
    """First-order F1 variance as the explicit five-term sum over b_0..b_4."""
    q = np.asarray(p, dtype=float)
    if len(q) < 5:
        raise SequenceLengthError(5, len(q), what="F1 variance")
    q = q[:5]
    n_shots = _equal_shots(shots, "variance_F1_closed")
    b = binomial_variances(q)
    total = (
        b[0] * (q[3] - q[2]) ** 2
        + b[1] * (2.0 * q[1] - q[2] - q[4]) ** 2
        + b[2] * (q[0] + q[1] - q[3] - q[4]) ** 2
        + b[3] * (2.0 * q[3] - q[2] - q[0]) ** 2
        + b[4] * (q[1] - q[2]) ** 2
    )
    return total / n_shots


def variance_F2_closed(p, shots) -> float:
    """First-order F2 variance grouped by the symmetric index pairs."""
    q = np.asarray(p, dtype=float)
    if len(q) < 7:
        raise SequenceLengthError(7, len(q), what="F2 variance")
    q = q[:7]
    n_shots = _equal_shots(shots, "variance_F2_closed")
    b = binomial_variances(q)
    a_form = q[2] - 2.0 * q[3] + q[4]
    b_form = q[6] - 2.0 * q[3] + q[0]
    c_form = q[2] - q[1] + q[4] - q[5]
    total = (
        (b[0] + b[6]) * a_form**2
        + 4.0 * (b[1] + b[5]) * c_form**2
        + (b[2] + b[4]) * (b_form - 2.0 * c_form) ** 2
        + 4.0 * b[3] * (a_form + b_form) ** 2
    )
    return total / n_shots


def second_order_F2_closed(p, shots) -> float:
    """Second-order F2 variance in closed form, carrying the explicit 1/N^2:

        [ (b2 + 4 b3 + b4)(b0 + 4 b3 + b6) + 16 b3^2
          + 2 (b1 + b2 + b4 + b5)^2 ] / N^2
    """
    q = np.asarray(p, dtype=float)
    if len(q) < 7:
        raise SequenceLengthError(7, len(q), what="F2 second-order variance")
    q = q[:7]
    n_shots = _equal_shots(shots, "second_order_F2_closed")
    b = binomial_variances(q)
    total = (
        (b[2] + 4.0 * b[3] + b[4]) * (b[0] + 4.0 * b[3] + b[6])
        + 16.0 * b[3] ** 2
        + 2.0 * (b[1] + b[2] + b[4] + b[5]) ** 2
    )
    return total / n_shots**2


# ---------------------------------------------------------------------------
# full error report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorReport:
    """Witness value with its delta-method shift and error budget."""

    value: float
    shift: float
    variance_first: float
    variance_second: float

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.variance_first + self.variance_second))

    @property
    def sigma_first_only(self) -> float:
        return float(np.sqrt(self.variance_first))

    @property
    def corrected(self) -> float:
        return self.value - self.shift


def error_report(kind: WitnessKind, p, shots) -> ErrorReport:
    """Evaluate a witness and its full shot-noise budget at measured
    frequencies p (derivatives taken at p itself)."""
    return ErrorReport(
        value=witness_value(kind, p),
        shift=delta_shift(kind, p, shots),
        variance_first=delta_variance(kind, p, shots),
        variance_second=second_order_variance(kind, p, shots),
    )


# ---------------------------------------------------------------------------
# sampling and Monte Carlo
# ---------------------------------------------------------------------------

def sample_counts(p, shots, seed) -> ShotCounts:
    """Independent binomial draws n_j ~ Bin(N_j, p_j), deterministic per seed.

    ``seed`` may be an int, a tuple of ints, or a Generator.
    """
    q = np.asarray(p, dtype=float)
    n = np.asarray(shots)
    if n.ndim == 0:
        n = np.full(len(q), int(n))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return ShotCounts(rng.binomial(n.astype(np.int64), q), n)


def _witness_batch(kind: WitnessKind, probs: np.ndarray) -> np.ndarray:
    """Witness values over a (trials, L) batch of probability vectors."""
    if kind.tag == "W":
        n = kind.order
        d = probs[:, :-1] - probs[:, 1:]
        idx = np.add.outer(np.arange(n), np.arange(n))
        return np.linalg.det(d[:, idx])
    if kind.tag == "F1":
        q = probs
        return (
            q[:, 1] ** 2
            + q[:, 0] * (q[:, 3] - q[:, 2])
            - q[:, 2] * (q[:, 1] - q[:, 3])
            - q[:, 3] ** 2
            + (q[:, 2] - q[:, 1]) * q[:, 4]
        )
    q = probs
    a_form = q[:, 2] - 2.0 * q[:, 3] + q[:, 4]
    b_form = q[:, 6] - 2.0 * q[:, 3] + q[:, 0]
    c_form = q[:, 2] - q[:, 1] + q[:, 4] - q[:, 5]
    return a_form * b_form - c_form**2


@dataclass(frozen=True)
class MonteCarloResult:
    """Sampled moments of a witness under binomial shot noise."""

    trials: int
    mean_delta: float        # average of F(p~) - F(p)
    mean_se: float           # Monte Carlo standard error of mean_delta
    variance: float          # sample variance of F(p~)
    variance_se: float       # approximate standard error of the variance


def mc_witness_moments(kind: WitnessKind, p, shots, trials: int, seed) -> MonteCarloResult:
    """Monte Carlo moments of the witness under shot noise.

    Trials are drawn in fixed-size chunks with independently seeded streams
    (spawn key = chunk index), so the result is reproducible and independent
    of how chunks would be scheduled.
    """
    q = np.asarray(p, dtype=float)[: kind.required_length]
    n = np.asarray(shots)
    if n.ndim == 0:
        n = np.full(len(q), int(n))
    n = n.astype(np.int64)
    base = witness_value(kind, q)
    total = 0
    s1 = 0.0
    s2 = 0.0
    chunk_idx = 0
    while total < trials:
        size = min(_MC_CHUNK, trials - total)
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk_idx,)))
        draws = rng.binomial(n[None, :].repeat(size, axis=0), q[None, :])
        vals = _witness_batch(kind, draws / n)
        s1 += float(np.sum(vals))
        s2 += float(np.sum(vals * vals))
        total += size
        chunk_idx += 1
    mean = s1 / total
    var = max(s2 / total - mean * mean, 0.0) * total / (total - 1)
    mean_se = np.sqrt(var / total)
    # relative SE of a sample variance is ~ sqrt(2/(trials-1)) for light tails
    var_se = var * np.sqrt(2.0 / (total - 1))
    return MonteCarloResult(total, mean - base, float(mean_se), var, float(var_se))
