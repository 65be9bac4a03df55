"""Classical maxima of |W_N| over probability vectors in [0, 1]^(2N).

Binary enumeration is exact over the hypercube vertices (most known
maximizers are 0/1 vectors); projected gradient ascent refines from the top
vertices and from random interior starts, which is what finds the interior
coordinates appearing at N = 3 and N = 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import (
    ARMIJO_C,
    BACKTRACK_FACTOR,
    BACKTRACK_START,
    PGRAD_NORM_TOL,
)
from .witnesses import WitnessKind, witness_W, witness_gradient

MAX_ENUM_N = 9          # 2^(2N) determinant evaluations; 262144 at N = 9
_ENUM_CHUNK = 1 << 16
_TIE_RTOL = 1e-12
DEFAULT_TOP_K = 64
DEFAULT_MAX_ITERS = 600


class ResourceError(ValueError):
    """The requested enumeration size is beyond the supported bound."""


@dataclass(frozen=True)
class MaximaResult:
    """An extremal probability vector for |W_N| and how it was found."""

    n: int
    best_p: np.ndarray
    value: float            # signed witness value at best_p
    abs_value: float
    method: str             # "binary_enumeration" or "refined"
    n_starts: int = 0
    seed: int | None = None
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        p = np.asarray(self.best_p, dtype=float)
        object.__setattr__(self, "best_p", p)
        if not np.all((p >= 0.0) & (p <= 1.0)):
            raise ValueError("maximizer leaves the [0, 1] box")
        if abs(self.abs_value - abs(self.value)) > 0.0:
            raise ValueError("abs_value must equal |value|")


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"witness order must be positive, got {n}")
    if n > MAX_ENUM_N:
        raise ResourceError(
            f"N = {n} needs 2^{2 * n} determinant evaluations; supported up to N = {MAX_ENUM_N}"
        )


def _binary_batch_dets(bits: np.ndarray, n: int) -> np.ndarray:
    """|W_N| determinants for a (batch, 2N) block of 0/1 vectors."""
    d = bits[:, :-1] - bits[:, 1:]
    idx = np.add.outer(np.arange(n), np.arange(n))
    return np.linalg.det(d[:, idx])


def _enumerate_scores(n: int):
    """Yield (start_index, dets) blocks over all of {0,1}^(2N) in
    lexicographic order (index bit 2N-1 is p_0, so index order = lex order)."""
    width = 2 * n
    total = 1 << width
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _ENUM_CHUNK):
        stop = min(start + _ENUM_CHUNK, total)
        codes = np.arange(start, stop, dtype=np.int64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(float)
        yield start, bits, _binary_batch_dets(bits, n)


def _bits_of(code: int, width: int) -> np.ndarray:
    return np.array([(code >> (width - 1 - j)) & 1 for j in range(width)], dtype=float)


def enumerate_binary(n: int) -> MaximaResult:
    """Exact extremum of |W_N| over the 0/1 vectors, lexicographically
    smallest maximizer on ties."""
    _check_n(n)
    best_abs = -1.0
    best_code = 0
    for start, _bits, dets in _enumerate_scores(n):
        mags = np.abs(dets)
        idx = int(np.argmax(mags))
        # argmax returns the first (lowest-index = lexicographically smallest)
        # maximizer within the block; across blocks keep the earlier one on ties
        if mags[idx] > best_abs * (1.0 + _TIE_RTOL):
            best_abs = float(mags[idx])
            best_code = start + idx
    p = _bits_of(best_code, 2 * n)
    value = witness_W(p, n)
    return MaximaResult(
        n=n, best_p=p, value=value, abs_value=abs(value), method="binary_enumeration"
    )


def _binary_top_k(n: int, k: int) -> list[np.ndarray]:
    """The k binary vectors with the largest |W_N|, deterministic order."""
    scored: list[tuple[float, int]] = []
    for start, _bits, dets in _enumerate_scores(n):
        mags = np.abs(dets)
        take = min(k, len(mags))
        part = np.argpartition(-mags, take - 1)[:take]
        scored.extend((float(mags[i]), start + int(i)) for i in part)
        scored.sort(key=lambda t: (-t[0], t[1]))
        scored = scored[:k]
    return [_bits_of(code, 2 * n) for _score, code in scored]


def refine_local(p0, n: int, max_iters: int = DEFAULT_MAX_ITERS) -> MaximaResult:
    """Projected gradient ascent on |W_N| from p0, with backtracking line
    search (Armijo) and coordinate clamping to [0, 1].

    Stops when the unit-step projected gradient norm drops below
    PGRAD_NORM_TOL; never decreases |W_N|.  If the iteration budget runs out
    the best iterate is returned with ``converged=False``.
    """
    kind = WitnessKind.w(n)
    p = np.clip(np.asarray(p0, dtype=float)[: 2 * n], 0.0, 1.0)
    if len(p) != 2 * n:
        raise ValueError(f"start vector must have length {2 * n}")
    value = witness_W(p, n)
    converged = False
    iters = 0
    for iters in range(1, max_iters + 1):
        sign = 1.0 if value >= 0.0 else -1.0
        grad = sign * witness_gradient(kind, p)
        pgrad = np.clip(p + grad, 0.0, 1.0) - p
        if np.linalg.norm(pgrad) < PGRAD_NORM_TOL:
            converged = True
            iters -= 1
            break
        step = BACKTRACK_START
        accepted = False
        while step > 1e-16:
            cand = np.clip(p + step * grad, 0.0, 1.0)
            cand_value = witness_W(cand, n)
            if abs(cand_value) >= abs(value) + ARMIJO_C * float(grad @ (cand - p)):
                p, value = cand, cand_value
                accepted = True
                break
            step *= BACKTRACK_FACTOR
        if not accepted:
            converged = True  # no ascent direction at any step size
            break
    return MaximaResult(
        n=n,
        best_p=p,
        value=value,
        abs_value=abs(value),
        method="refined",
        converged=converged,
        iterations=iters,
    )


def find_maximum(
    n: int,
    n_starts: int = 32,
    seed: int = 0,
    top_k: int = DEFAULT_TOP_K,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> MaximaResult:
    """Best of local refinements from the top binary vertices and from
    ``n_starts`` random interior points; deterministic per seed.

    Never worse than ``enumerate_binary(n)`` in absolute value.  Candidates
    are merged by (abs value desc, lexicographic p asc).
    """
    _check_n(n)
    starts = _binary_top_k(n, top_k)
    rng = np.random.default_rng(seed)
    starts.extend(rng.random(2 * n) for _ in range(n_starts))
    candidates = [refine_local(p0, n, max_iters=max_iters) for p0 in starts]
    candidates.append(enumerate_binary(n))
    best = max(candidates, key=lambda r: (r.abs_value, tuple(-r.best_p)))
    return MaximaResult(
        n=n,
        best_p=best.best_p,
        value=best.value,
        abs_value=best.abs_value,
        method=best.method,
        n_starts=n_starts,
        seed=seed,
        converged=best.converged,
        iterations=best.iterations,
    )
