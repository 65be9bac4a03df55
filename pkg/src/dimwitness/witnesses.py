"""Dimension and unitarity witnesses of a repeated-operation probability
sequence, with analytic gradients and Hessians.

``witness_W(p, N)`` is the determinant of the N x N matrix of successive
differences W[j, k] = p[j+k] - p[j+k+1]; it vanishes whenever the sequence is
generated by a system whose measurement-operator space (identity included)
has dimension at most N.  ``witness_F1`` and ``witness_F2`` are the
closed-form qubit witnesses built from the pairwise eigenvalue constraints of
a unitary (respectively almost-unitary) operation; F1 responds linearly and
F2 quadratically to a small damping of the rotation eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    SequenceLengthError,
    adjugate,
    det,
    toeplitz_from_differences,
)
from .tolerances import HESSIAN_FD_STEP

# coefficient vectors of the three linear forms entering F2:
#   A = p2 - 2 p3 + p4,  B = p6 - 2 p3 + p0,  C = p2 - p1 + p4 - p5
_F2_ALPHA = np.array([0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0])
_F2_BETA = np.array([1.0, 0.0, 0.0, -2.0, 0.0, 0.0, 1.0])
_F2_GAMMA = np.array([0.0, -1.0, 1.0, 0.0, 1.0, -1.0, 0.0])


@dataclass(frozen=True)
class WitnessKind:
    """Identifies a witness: W(N) for N >= 1, F1, or F2."""

    tag: str
    order: int | None = None

    def __post_init__(self):
        if self.tag == "W":
            if not self.order or self.order < 1:
                raise ValueError("W witness needs a positive order N")
        elif self.tag in ("F1", "F2"):
            if self.order is not None:
                raise ValueError(f"{self.tag} takes no order")
        else:
            raise ValueError(f"unknown witness tag {self.tag!r}")

    @classmethod
    def w(cls, n: int) -> "WitnessKind":
        return cls("W", n)

    @classmethod
    def f1(cls) -> "WitnessKind":
        return cls("F1")

    @classmethod
    def f2(cls) -> "WitnessKind":
        return cls("F2")

    @classmethod
    def parse(cls, text: str) -> "WitnessKind":
        t = text.strip().lower()
        if t == "f1":
            return cls.f1()
        if t == "f2":
            return cls.f2()
        if t.startswith("w") and t[1:].isdigit():
            return cls.w(int(t[1:]))
        raise ValueError(f"cannot parse witness kind {text!r} (try w3, w4, f1, f2)")

    @property
    def required_length(self) -> int:
        if self.tag == "W":
            return 2 * self.order
        return 5 if self.tag == "F1" else 7

    def __str__(self) -> str:
        return f"W{self.order}" if self.tag == "W" else self.tag


def _as_probs(p, needed: int, what: str) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or len(arr) < needed:
        raise SequenceLengthError(needed, arr.shape[0] if arr.ndim == 1 else 0, what=what)
    return arr


def witness_W(p, n: int) -> float:
    """det of the N x N successive-difference matrix of p (needs 2N values)."""
    arr = _as_probs(p, 2 * n, f"W({n})")
    return float(det(toeplitz_from_differences(arr, n)))


def witness_W_tilde(p, n: int) -> float:
    """Equivalent determinant form: the (N+1) x (N+1) matrix with rows
    (p[j+k])_{k=0..N} for j = 0..N-1 and a final row of ones."""
    arr = _as_probs(p, 2 * n, f"W~({n})")
    m = np.empty((n + 1, n + 1))
    for j in range(n):
        m[j] = arr[j : j + n + 1]
    m[n] = 1.0
    return float(det(m))


def witness_F1(p) -> float:
    """Qubit-unitarity witness from the pairwise eigenvalue constraint;
    vanishes for any unitary qubit operation, scales linearly in a small
    damping of the rotation eigenvalues."""
    q = _as_probs(p, 5, "F1")
    return float(
        q[1] ** 2
        + q[0] * (q[3] - q[2])
        - q[2] * (q[1] - q[3])
        - q[3] ** 2
        + (q[2] - q[1]) * q[4]
    )


def witness_F2(p) -> float:
    """Almost-unitary qubit witness; vanishes for unitary qubit operations
    and scales quadratically in a small damping (needs 7 values)."""
    q = _as_probs(p, 7, "F2")
    a = _F2_ALPHA @ q[:7]
    b = _F2_BETA @ q[:7]
    c = _F2_GAMMA @ q[:7]
    return float(a * b - c * c)


def eigenvalue_constraint(alpha: complex, beta: complex, squared: bool = False) -> complex:
    """The pairwise eigenvalue constraint (a-b)^2 (ab-1)(a-1)(b-1), or its
    almost-unitary modification [(a-b)(ab-1)(a-1)(b-1)]^2 when ``squared``."""
    a, b = complex(alpha), complex(beta)
    core = (a - b) * (a * b - 1.0) * (a - 1.0) * (b - 1.0)
    if squared:
        return core * core
    return (a - b) * core


def witness_value(kind: WitnessKind, p) -> float:
    if kind.tag == "W":
        return witness_W(p, kind.order)
    if kind.tag == "F1":
        return witness_F1(p)
    return witness_F2(p)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

def _adjugate_antidiagonals(adj: np.ndarray) -> np.ndarray:
    """s[m] = sum over j+k = m of adj[k, j], padded with a leading zero slot."""
    n = adj.shape[0]
    s = np.zeros(2 * n - 1)
    for j in range(n):
        for k in range(n):
            s[j + k] += adj[k, j]
    return s


def _w_gradient(p: np.ndarray, n: int) -> np.ndarray:
    """d det W / d p_i through the difference entries: the adjugate chain rule."""
    adj = adjugate(toeplitz_from_differences(p, n))
    s = _adjugate_antidiagonals(np.asarray(adj, dtype=float))
    g = np.zeros(2 * n)
    for i in range(2 * n):
        left = s[i] if i <= 2 * n - 2 else 0.0
        right = s[i - 1] if i >= 1 else 0.0
        g[i] = left - right
    return g


def _second_cofactor_tensor(w: np.ndarray) -> np.ndarray:
    """t[a, b, c, d] = d^2 det(w) / d w[a,b] d w[c,d] via signed double minors.

    Exact for singular matrices, unlike anything built on the inverse.
    """
    n = w.shape[0]
    t = np.zeros((n, n, n, n))
    idx = np.arange(n)
    for a in range(n):
        for c in range(n):
            if a == c:
                continue
            rows = idx[(idx != a) & (idx != c)]
            for b in range(n):
                for d_ in range(n):
                    if b == d_:
                        continue
                    cols = idx[(idx != b) & (idx != d_)]
                    minor = w[np.ix_(rows, cols)]
                    sign = (-1.0) ** (a + b + c + d_)
                    if (a < c) != (b < d_):
                        sign = -sign
                    t[a, b, c, d_] = sign * det(minor)
    return t


def _w_hessian_exact(p: np.ndarray, n: int) -> np.ndarray:
    """Analytic Hessian of det W via second-order cofactors (small N)."""
    w = toeplitz_from_differences(p, n)
    t = _second_cofactor_tensor(w)
    # collapse entry pairs onto anti-diagonal index pairs
    u = np.zeros((2 * n - 1, 2 * n - 1))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d_ in range(n):
                    u[a + b, c + d_] += t[a, b, c, d_]

    def at(m, l):
        if 0 <= m <= 2 * n - 2 and 0 <= l <= 2 * n - 2:
            return u[m, l]
        return 0.0

    h = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(2 * n):
            h[i, j] = at(i, j) - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1)
    return h


def _w_hessian_fd(p: np.ndarray, n: int, step: float = HESSIAN_FD_STEP) -> np.ndarray:
    """Central finite differences of the analytic gradient (N > 4 fallback)."""
    size = 2 * n
    h = np.zeros((size, size))
    for i in range(size):
        shift = np.zeros(size)
        shift[i] = step
        h[:, i] = (_w_gradient(p[:size] + shift, n) - _w_gradient(p[:size] - shift, n)) / (2 * step)
    return 0.5 * (h + h.T)


def f1_hessian() -> np.ndarray:
    """Constant Hessian of F1 (F1 is quadratic in p)."""
    h = np.zeros((5, 5))
    h[0, 2] = h[2, 0] = -1.0
    h[0, 3] = h[3, 0] = 1.0
    h[1, 1] = 2.0
    h[1, 2] = h[2, 1] = -1.0
    h[1, 4] = h[4, 1] = -1.0
    h[2, 3] = h[3, 2] = 1.0
    h[2, 4] = h[4, 2] = 1.0
    h[3, 3] = -2.0
    return h


def f2_hessian() -> np.ndarray:
    """Constant Hessian of F2 = A B - C^2 (outer products of the forms)."""
    return (
        np.outer(_F2_ALPHA, _F2_BETA)
        + np.outer(_F2_BETA, _F2_ALPHA)
        - 2.0 * np.outer(_F2_GAMMA, _F2_GAMMA)
    )


def witness_gradient(kind: WitnessKind, p) -> np.ndarray:
    """Analytic partial derivatives with respect to p_0 .. p_{L-1} where L is
    the witness's required length."""
    arr = _as_probs(p, kind.required_length, str(kind))
    if kind.tag == "W":
        return _w_gradient(arr, kind.order)
    if kind.tag == "F1":
        q = arr[:5]
        return np.array(
            [
                q[3] - q[2],
                2.0 * q[1] - q[2] - q[4],
                -q[0] - q[1] + q[3] + q[4],
                q[0] + q[2] - 2.0 * q[3],
                q[2] - q[1],
            ]
        )
    q = arr[:7]
    a = _F2_ALPHA @ q
    b = _F2_BETA @ q
    c = _F2_GAMMA @ q
    return _F2_ALPHA * b + _F2_BETA * a - 2.0 * c * _F2_GAMMA


def witness_hessian(kind: WitnessKind, p) -> np.ndarray:
    """Second derivatives; exact for F1, F2 and W(N <= 4), finite differences
    of the analytic gradient above that (accuracy ~ HESSIAN_FD_STEP^2)."""
    arr = _as_probs(p, kind.required_length, str(kind))
    if kind.tag == "F1":
        return f1_hessian()
    if kind.tag == "F2":
        return f2_hessian()
    if kind.order <= 4:
        return _w_hessian_exact(arr, kind.order)
    return _w_hessian_fd(arr, kind.order)
