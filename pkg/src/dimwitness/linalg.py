"""Small dense matrix kernel: determinants, adjugates, eigenvalues, and the
difference-Toeplitz construction.

Everything here operates on plain complex numpy arrays of dimension at most
``MAX_DIM``.  Determinants use exact cofactor expansion up to 4x4 (the witness
sizes used most) and partially pivoted elimination above, so small-witness
values are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tolerances import (
    CONJUGATE_PAIR_TOL,
    DET_COFACTOR_MAX_DIM,
    MAX_DIM,
    SPECTRUM_TIE_TOL,
)


class DimensionError(ValueError):
    """Input matrix is not square, is too large, or shapes are inconsistent."""


class SequenceLengthError(ValueError):
    """A probability sequence is shorter than an operation requires."""

    def __init__(self, needed: int, got: int, what: str = "sequence"):
        self.needed = needed
        self.got = got
        super().__init__(f"{what} requires length >= {needed}, got {got}")


class EigenvalueError(RuntimeError):
    """Eigenvalue iteration failed to converge; carries any partial result."""

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


def as_square(m, what: str = "matrix") -> np.ndarray:
    """Validate and return ``m`` as a square complex array of dim <= MAX_DIM."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise DimensionError(f"{what} dimension {a.shape[0]} exceeds limit {MAX_DIM}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise DimensionError(f"{what} contains non-finite entries")
    return a


def _as_scalar(z: complex):
    """Return a real float when the imaginary part is exactly zero."""
    return z.real if z.imag == 0.0 else z


def _det_cofactor(a: np.ndarray) -> complex:
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j  # empty product; needed for second-order cofactors
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if n == 3:
        return (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    # n == 4: expand along the first row into 3x3 cofactors
    total = 0.0 + 0.0j
    sign = 1.0
    for k in range(4):
        minor = np.delete(np.delete(a, 0, axis=0), k, axis=1)
        total += sign * a[0, k] * _det_cofactor(minor)
        sign = -sign
    return total


def _det_eliminate(a: np.ndarray) -> complex:
    """Determinant by Gaussian elimination with partial (modulus) pivoting."""
    u = a.copy()
    n = u.shape[0]
    det = 1.0 + 0.0j
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(u[col:, col])))
        if u[pivot, col] == 0.0:
            return 0.0 + 0.0j
        if pivot != col:
            u[[col, pivot]] = u[[pivot, col]]
            det = -det
        det *= u[col, col]
        u[col + 1 :, col:] -= np.outer(u[col + 1 :, col] / u[col, col], u[col, col:])
    return det


def det(m) -> float | complex:
    """Determinant of a square matrix of dimension <= MAX_DIM.

    Cofactor expansion for dimension <= 4, partially pivoted elimination
    above.  Real inputs return a real float.
    """
    a = as_square(m)
    n = a.shape[0]
    d = _det_cofactor(a) if n <= DET_COFACTOR_MAX_DIM else _det_eliminate(a)
    if np.isrealobj(np.asarray(m)):
        return d.real
    return _as_scalar(d)


def _batched_det(stack: np.ndarray) -> np.ndarray:
    """np.linalg.det over a stack; used internally where throughput matters."""
    if stack.shape[-1] == 0:
        return np.ones(stack.shape[:-2], dtype=stack.dtype)
    return np.linalg.det(stack)


def _minor_stack(a: np.ndarray) -> np.ndarray:
    """Stack of all (n-1)x(n-1) minors of ``a``, indexed [row, col]."""
    n = a.shape[0]
    keep = [np.delete(np.arange(n), i) for i in range(n)]
    out = np.empty((n, n, n - 1, n - 1), dtype=a.dtype)
    for i in range(n):
        ai = a[keep[i]]
        for j in range(n):
            out[i, j] = ai[:, keep[j]]
    return out


def adjugate(m) -> np.ndarray:
    """Transposed cofactor matrix, satisfying ``m @ adjugate(m) = det(m) I``.

    Valid for singular input (unlike ``det(m) inv(m)``), which matters here:
    the witness matrices this is applied to are singular by construction.
    """
    a = as_square(m)
    n = a.shape[0]
    if n == 1:
        dtype = float if np.isrealobj(np.asarray(m)) else complex
        return np.ones((1, 1), dtype=dtype)
    minors = _minor_stack(a)
    if n - 1 <= DET_COFACTOR_MAX_DIM:
        cof = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                cof[i, j] = _det_cofactor(minors[i, j])
    else:
        cof = _batched_det(minors.reshape(n * n, n - 1, n - 1)).reshape(n, n)
    signs = (-1.0) ** (np.add.outer(np.arange(n), np.arange(n)))
    adj = (signs * cof).T
    if np.isrealobj(np.asarray(m)):
        return adj.real
    return adj


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ordered by descending modulus, ties by ascending phase.

    Phases live in (-pi, pi].  The ordering is deterministic so downstream
    tests can compare spectra directly.
    """

    eigenvalues: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]


def _spectrum_order(vals: np.ndarray) -> np.ndarray:
    """Index order: modulus descending, then phase ascending within a
    modulus tie group (moduli within SPECTRUM_TIE_TOL count as tied)."""
    mods = np.abs(vals)
    idx = np.argsort(-mods, kind="stable")
    out = []
    i = 0
    while i < len(idx):
        j = i
        while j + 1 < len(idx) and mods[idx[i]] - mods[idx[j + 1]] <= SPECTRUM_TIE_TOL:
            j += 1
        group = sorted(idx[i : j + 1], key=lambda k: np.angle(vals[k]))
        out.extend(group)
        i = j + 1
    return np.array(out, dtype=int)


def eigenvalues(m, with_vectors: bool = False):
    """All eigenvalues of ``m`` as a Spectrum, optionally with eigenvectors.

    The returned vectors (columns) are ordered consistently with the
    spectrum and satisfy ``||m v - lam v|| <= EIG_RESIDUAL_RTOL * ||m||``.
    Raises EigenvalueError if the underlying QR iteration fails to converge.
    """
    a = as_square(m)
    try:
        if with_vectors:
            vals, vecs = np.linalg.eig(a)
        else:
            vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(f"eigenvalue iteration did not converge: {exc}") from exc
    order = _spectrum_order(vals)
    spec = Spectrum(vals[order])
    if with_vectors:
        return spec, vecs[:, order]
    return spec


def is_conjugation_closed(spec: Spectrum, tol: float = CONJUGATE_PAIR_TOL) -> bool:
    """True if every eigenvalue has a conjugate partner within ``tol``.

    A near-real eigenvalue (|Im| <= tol) is its own partner; the rest are
    matched greedily in pairs.
    """
    vals = list(spec.eigenvalues)
    used = [False] * len(vals)
    for i, v in enumerate(vals):
        if used[i]:
            continue
        used[i] = True
        if abs(v.imag) <= tol:
            continue
        candidates = [
            (abs(vals[j] - np.conj(v)), j) for j in range(len(vals)) if not used[j]
        ]
        if not candidates:
            return False
        dist, j = min(candidates)
        if dist > tol:
            return False
        used[j] = True
    return True


def toeplitz_from_differences(p, n: int) -> np.ndarray:
    """The n x n matrix with entry (j, k) = p[j+k] - p[j+k+1].

    Entries are constant along anti-diagonals; requires len(p) >= 2n.
    """
    p = np.asarray(p, dtype=float)
    if n < 1:
        raise DimensionError(f"matrix dimension must be positive, got {n}")
    if p.ndim != 1 or len(p) < 2 * n:
        raise SequenceLengthError(2 * n, len(p), what=f"difference matrix of size {n}")
    d = p[:-1] - p[1:]
    return d[np.add.outer(np.arange(n), np.arange(n))]


def matrix_power_apply(t: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """t^n @ v by repeated application (n is small here)."""
    out = np.asarray(v, dtype=float).copy()
    for _ in range(n):
        out = t @ out
    return out
