"""Quantum channels, classical chains, and the probability sequences they
generate under repetition.

A channel acts on measurement operators as ``M -> sum_j K_j M K_j^dag`` with
the normalization ``sum_j K_j K_j^dag = 1`` (identity goes to identity, so
outcome probabilities stay normalized).  Repeating the channel n times on a
measurement operator M and pairing with an initial state P gives the sequence

    p_n = Tr[P R^n(M)],   n = 0, 1, 2, ...

which is what the witness layer consumes.  Classical Markov chains and bare
eigenvalue-mode expansions produce sequences through the same interface.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .linalg import DimensionError, as_square, eigenvalues
from .tolerances import (
    HERMITIAN_TOL,
    KRAUS_NORM_TOL,
    MEASUREMENT_SPECTRUM_TOL,
    MODE_IMAG_TOL,
    PROB_CLAMP_TOL,
    PSD_TOL,
    STOCHASTIC_TOL,
    TRACE_TOL,
    UNITARY_TOL,
)

PROB_VIOLATION_ERROR = 1e-6  # beyond this the channel is broken, not roundoff


class ChannelSpecError(ValueError):
    """A channel specification (JSON or preset string) is malformed."""


class ProbabilityClampWarning(UserWarning):
    """A generated probability strayed outside [0, 1] by more than roundoff."""


def _check_hermitian(a: np.ndarray, what: str) -> None:
    if np.max(np.abs(a - a.conj().T)) > HERMITIAN_TOL:
        raise ValueError(f"{what} is not Hermitian within {HERMITIAN_TOL}")


@dataclass(frozen=True)
class DensityMatrix:
    """A d x d density matrix: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray

    def __post_init__(self):
        a = as_square(self.matrix, "density matrix")
        _check_hermitian(a, "density matrix")
        w = np.linalg.eigvalsh(a)
        if w.min() < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {w.min():.3e}")
        if abs(np.trace(a).real - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(a).real} != 1")
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class MeasurementOperator:
    """A d x d measurement effect: Hermitian with spectrum inside [0, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        a = as_square(self.matrix, "measurement operator")
        _check_hermitian(a, "measurement operator")
        w = np.linalg.eigvalsh(a)
        if w.min() < -MEASUREMENT_SPECTRUM_TOL or w.max() > 1.0 + MEASUREMENT_SPECTRUM_TOL:
            raise ValueError(
                f"measurement operator spectrum [{w.min():.3e}, {w.max():.3e}] "
                "is not inside [0, 1]"
            )
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausChannel:
    """A channel in Kraus form acting on measurement operators.

    ``relaxed=True`` skips the normalization check, allowing sub-normalized
    operator sets for eigenvalue-mode studies.
    """

    dim: int
    kraus_ops: tuple
    relaxed: bool = False

    def __post_init__(self):
        if not self.kraus_ops:
            raise ValueError("channel needs at least one Kraus operator")
        ops = tuple(as_square(k, "Kraus operator") for k in self.kraus_ops)
        for k in ops:
            if k.shape[0] != self.dim:
                raise DimensionError(
                    f"Kraus operator dim {k.shape[0]} != channel dim {self.dim}"
                )
        if not self.relaxed:
            total = sum(k @ k.conj().T for k in ops)
            err = np.max(np.abs(total - np.eye(self.dim)))
            if err > KRAUS_NORM_TOL:
                raise ValueError(
                    f"Kraus set violates sum_j K_j K_j^dag = 1 by {err:.3e} "
                    "(pass relaxed=True to allow sub-normalized channels)"
                )
        object.__setattr__(self, "kraus_ops", ops)


@dataclass(frozen=True)
class ClassicalChain:
    """A d-state Markov chain with a column-stochastic transition matrix.

    ``transition`` acts on column probability vectors (columns sum to 1),
    ``initial`` is the starting distribution and ``indicator`` holds the
    per-state response of the measured outcome, entries in [0, 1].
    """

    transition: np.ndarray
    initial: np.ndarray
    indicator: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        init = np.asarray(self.initial, dtype=float)
        ind = np.asarray(self.indicator, dtype=float)
        d = t.shape[0]
        if t.ndim != 2 or t.shape != (d, d):
            raise DimensionError(f"transition matrix must be square, got {t.shape}")
        if init.shape != (d,) or ind.shape != (d,):
            raise DimensionError("initial/indicator lengths must match chain dimension")
        if t.min() < -STOCHASTIC_TOL:
            raise ValueError("transition matrix has a negative entry")
        if np.max(np.abs(t.sum(axis=0) - 1.0)) > STOCHASTIC_TOL:
            raise ValueError("transition matrix columns must sum to 1")
        if init.min() < -STOCHASTIC_TOL or abs(init.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValueError("initial distribution must be nonnegative and sum to 1")
        if ind.min() < -STOCHASTIC_TOL or ind.max() > 1.0 + STOCHASTIC_TOL:
            raise ValueError("indicator entries must lie in [0, 1]")
        object.__setattr__(self, "transition", t)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "indicator", ind)

    @property
    def dim(self) -> int:
        return self.transition.shape[0]


@dataclass(frozen=True)
class ModeExpansion:
    """A sequence model p_n = sum_j A_j lambda_j^n.

    Amplitudes and eigenvalues must occur in conjugate pairs so that the
    reconstruction is real; this is checked at evaluation time.
    """

    modes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pairs = tuple((complex(a), complex(lam)) for a, lam in self.modes)
        if not pairs:
            raise ValueError("mode expansion needs at least one mode")
        object.__setattr__(self, "modes", pairs)


def _operator_matrix(op) -> np.ndarray:
    if isinstance(op, (DensityMatrix, MeasurementOperator)):
        return op.matrix
    return as_square(op, "operator")


def apply_heisenberg(ch: KrausChannel, m):
    """One channel application: ``m -> sum_j K_j m K_j^dag``.

    Accepts a MeasurementOperator (returns one) or a plain array (returns an
    array).  Preserves Hermiticity, and maps identity to identity for
    normalized channels.
    """
    a = _operator_matrix(m)
    if a.shape[0] != ch.dim:
        raise DimensionError(f"operator dim {a.shape[0]} != channel dim {ch.dim}")
    out = np.zeros_like(a)
    for k in ch.kraus_ops:
        out += k @ a @ k.conj().T
    if isinstance(m, MeasurementOperator):
        return MeasurementOperator(out)
    return out


def _clamp_probabilities(p: np.ndarray, what: str) -> np.ndarray:
    """Clamp to [0, 1]; warn past PROB_CLAMP_TOL, error past PROB_VIOLATION_ERROR."""
    worst = max(float(np.max(p - 1.0, initial=0.0)), float(np.max(-p, initial=0.0)))
    if worst > PROB_VIOLATION_ERROR:
        raise ValueError(
            f"{what} produced probability outside [0, 1] by {worst:.3e}; "
            "this signals a broken channel, not roundoff"
        )
    if worst > PROB_CLAMP_TOL:
        warnings.warn(
            f"{what} clamped probabilities violating [0, 1] by {worst:.3e}",
            ProbabilityClampWarning,
            stacklevel=3,
        )
    return np.clip(p, 0.0, 1.0)


def probability_sequence(state, ch: KrausChannel, effect, length: int) -> np.ndarray:
    """Outcome probabilities p_n = Tr[P R^n(M)] for n = 0 .. length-1.

    Parameters
    ----------
    state : DensityMatrix or (d, d) array
        Initial state P.
    ch : KrausChannel
        The repeated operation.
    effect : MeasurementOperator or (d, d) array
        Measured effect M.
    length : int
        Number of sequence values (n = 0 counts the unrepeated measurement).

    Returns
    -------
    np.ndarray of float, clamped to [0, 1].
    """
    if length < 1:
        raise ValueError("sequence length must be >= 1")
    p_mat = DensityMatrix(state).matrix if not isinstance(state, DensityMatrix) else state.matrix
    m_mat = (
        MeasurementOperator(effect).matrix
        if not isinstance(effect, MeasurementOperator)
        else effect.matrix
    )
    if p_mat.shape[0] != ch.dim or m_mat.shape[0] != ch.dim:
        raise DimensionError("state/effect dimension does not match the channel")
    out = np.empty(length)
    current = m_mat
    for n in range(length):
        out[n] = np.trace(p_mat @ current).real
        if n + 1 < length:
            current = apply_heisenberg(ch, current)
    return _clamp_probabilities(out, "probability_sequence")


def classical_sequence(chain: ClassicalChain, length: int) -> np.ndarray:
    """p_n = indicator . T^n . initial for n = 0 .. length-1."""
    if length < 1:
        raise ValueError("sequence length must be >= 1")
    out = np.empty(length)
    dist = chain.initial.copy()
    for n in range(length):
        out[n] = float(chain.indicator @ dist)
        if n + 1 < length:
            dist = chain.transition @ dist
    return _clamp_probabilities(out, "classical_sequence")


def sequence_from_modes(modes: ModeExpansion, length: int, clamp: bool = True) -> np.ndarray:
    """Evaluate p_n = Re sum_j A_j lambda_j^n for n = 0 .. length-1.

    Raises if the imaginary residual of any value exceeds MODE_IMAG_TOL
    (modes must come in conjugate pairs).  With ``clamp=False`` the raw real
    values are returned without the [0, 1] range policy, which is needed for
    eigenvalue-mode studies that are not trace-preserving channels.
    """
    if length < 1:
        raise ValueError("sequence length must be >= 1")
    n = np.arange(length)
    total = np.zeros(length, dtype=complex)
    for amp, lam in modes.modes:
        total += amp * lam ** n
    imag = float(np.max(np.abs(total.imag)))
    if imag > MODE_IMAG_TOL:
        raise ValueError(
            f"mode reconstruction has imaginary residual {imag:.3e}; "
            "amplitudes/eigenvalues must occur in conjugate pairs"
        )
    vals = total.real
    if clamp:
        return _clamp_probabilities(vals, "sequence_from_modes")
    return vals


# ---------------------------------------------------------------------------
# superoperator representations
# ---------------------------------------------------------------------------

def operator_basis(dim: int, kind: str = "matrix_unit") -> list:
    """Orthonormal operator basis for d x d matrices.

    "matrix_unit": E_ab with (a, b) lexicographic -- the default, matching
    row-major vectorization.  "gell_mann": identity/sqrt(d), then the
    symmetric and antisymmetric off-diagonal pairs (a < b, lexicographic),
    then the diagonal traceless matrices; all orthonormal under Tr[B_i B_j].
    """
    if kind == "matrix_unit":
        basis = []
        for a in range(dim):
            for b in range(dim):
                e = np.zeros((dim, dim), dtype=complex)
                e[a, b] = 1.0
                basis.append(e)
        return basis
    if kind == "gell_mann":
        basis = [np.eye(dim, dtype=complex) / np.sqrt(dim)]
        for a in range(dim):
            for b in range(a + 1, dim):
                sym = np.zeros((dim, dim), dtype=complex)
                sym[a, b] = sym[b, a] = 1.0 / np.sqrt(2.0)
                basis.append(sym)
                asym = np.zeros((dim, dim), dtype=complex)
                asym[a, b] = -1.0j / np.sqrt(2.0)
                asym[b, a] = 1.0j / np.sqrt(2.0)
                basis.append(asym)
        for k in range(1, dim):
            diag = np.zeros((dim, dim), dtype=complex)
            diag[:k, :k] = np.eye(k)
            diag[k, k] = -k
            basis.append(diag / np.sqrt(k * (k + 1)))
        return basis
    raise ValueError(f"unknown operator basis {kind!r}")


def superoperator_matrix(ch: KrausChannel, basis: str = "matrix_unit") -> np.ndarray:
    """The d^2 x d^2 matrix of ``m -> sum_j K_j m K_j^dag``.

    In the matrix-unit basis this is ``sum_j kron(K_j, conj(K_j))`` acting on
    row-major vectorized operators.  In the "gell_mann" basis the entries are
    R_ij = Tr[B_i R(B_j)], real for Hermiticity-preserving channels.
    """
    if basis == "matrix_unit":
        d = ch.dim
        s = np.zeros((d * d, d * d), dtype=complex)
        for k in ch.kraus_ops:
            s += np.kron(k, k.conj())
        return s
    ops = operator_basis(ch.dim, basis)
    n = len(ops)
    s = np.empty((n, n), dtype=complex)
    for j, bj in enumerate(ops):
        image = apply_heisenberg(ch, bj)
        for i, bi in enumerate(ops):
            s[i, j] = np.trace(bi.conj().T @ image)
    if np.max(np.abs(s.imag)) < HERMITIAN_TOL:
        return s.real
    return s


def modes_from_channel(ch: KrausChannel, state, effect) -> ModeExpansion:
    """Eigenvalue-mode expansion of p_n = Tr[P R^n(M)].

    Diagonalizes the superoperator and projects P and M onto its eigenbasis,
    so that ``sequence_from_modes`` reproduces ``probability_sequence``.
    """
    p_mat = _operator_matrix(state)
    m_mat = _operator_matrix(effect)
    s = superoperator_matrix(ch)
    spec, vecs = eigenvalues(s, with_vectors=True)
    w = p_mat.T.reshape(-1)       # Tr[P X] = vec(P^T) . vec(X), row-major
    v = m_mat.reshape(-1)
    coeffs = np.linalg.solve(vecs, v)
    amps = (w @ vecs) * coeffs
    return ModeExpansion(tuple(zip(amps, spec.eigenvalues)))


# ---------------------------------------------------------------------------
# channel constructors
# ---------------------------------------------------------------------------

def make_unitary_channel(u) -> KrausChannel:
    """Channel with the single Kraus operator U (U unitary)."""
    a = as_square(u, "unitary")
    err = np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0])))
    if err > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary within {UNITARY_TOL} (error {err:.3e})")
    return KrausChannel(a.shape[0], (a,))


def x_rotation(theta: float) -> np.ndarray:
    """Qubit rotation exp(-i theta X / 2) about the x axis."""
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -1.0j * s], [-1.0j * s, c]])


def sqrt_x() -> np.ndarray:
    """The pi/2 x-rotation (1/sqrt(2)) [[1, -i], [-i, 1]]."""
    return x_rotation(np.pi / 2.0)


def _check_rate(rate: float, name: str) -> float:
    rate = float(rate)
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {rate}")
    return rate


def make_amplitude_damping(gamma: float) -> KrausChannel:
    """Qubit energy relaxation at rate gamma (population of |1> decays)."""
    gamma = _check_rate(gamma, "amplitude damping rate")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [np.sqrt(gamma), 0.0]], dtype=complex)
    return KrausChannel(2, (k0, k1))


def make_phase_damping(lam: float) -> KrausChannel:
    """Qubit pure dephasing: coherences shrink by sqrt(1 - lam)."""
    lam = _check_rate(lam, "phase damping rate")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - lam)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, np.sqrt(lam)]], dtype=complex)
    return KrausChannel(2, (k0, k1))


def make_depolarizing(q: float) -> KrausChannel:
    """Qubit depolarizing channel; Bloch vectors contract by (1 - q)."""
    q = _check_rate(q, "depolarizing rate")
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    ops = (
        np.sqrt(1.0 - 0.75 * q) * np.eye(2, dtype=complex),
        np.sqrt(q / 4.0) * sx,
        np.sqrt(q / 4.0) * sy,
        np.sqrt(q / 4.0) * sz,
    )
    return KrausChannel(2, ops)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim, (np.eye(dim, dtype=complex),))


def compose_channels(*channels: KrausChannel) -> KrausChannel:
    """Composition applied to the measurement operator left to right:
    ``compose_channels(a, b)`` maps m -> b(a(m))."""
    if not channels:
        raise ValueError("need at least one channel")
    dim = channels[0].dim
    ops = list(channels[0].kraus_ops)
    relaxed = channels[0].relaxed
    for ch in channels[1:]:
        if ch.dim != dim:
            raise DimensionError("cannot compose channels of different dimension")
        ops = [k2 @ k1 for k2 in ch.kraus_ops for k1 in ops]
        relaxed = relaxed or ch.relaxed
    return KrausChannel(dim, tuple(ops), relaxed=relaxed)


def add_sink_state(ch: KrausChannel, leak_rate: float) -> KrausChannel:
    """Extend the channel by one absorbing (sink) state.

    Per application, a fraction ``leak_rate`` of the population leaks
    irreversibly into the sink, which is inert under the dynamics.  The
    output channel is normalized on dimension d + 1.
    """
    eps = float(leak_rate)
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"leak rate must lie in [0, 1), got {eps}")
    d = ch.dim
    scale = np.sqrt(1.0 - eps)

    def embed(k):
        out = np.zeros((d + 1, d + 1), dtype=complex)
        out[:d, :d] = k
        return out

    ops = [scale * embed(k) for k in ch.kraus_ops]
    ops[0][d, d] = 1.0  # the sink survives inside the first Kraus operator
    for i in range(d):
        leak = np.zeros((d + 1, d + 1), dtype=complex)
        leak[i, d] = np.sqrt(eps)
        ops.append(leak)
    return KrausChannel(d + 1, tuple(ops))


def embed_with_sink(op, sink_value: float = 0.0) -> np.ndarray:
    """Extend a d x d operator to the sink-extended space.

    The sink diagonal entry is ``sink_value`` (0 by default: the sink never
    triggers the measurement and carries no initial population).
    """
    a = _operator_matrix(op)
    d = a.shape[0]
    out = np.zeros((d + 1, d + 1), dtype=complex)
    out[:d, :d] = a
    out[d, d] = sink_value
    return out


def damped_rotation_modes(eps: float, unit_amplitude: float = 0.5) -> ModeExpansion:
    """Mode set with eigenvalues 1 and +-i(1 - eps) tuned so that the
    unitarity witnesses scale as F1 = 8 eps + O(eps^2) and
    F2 = -32 eps^2 + O(eps^3).

    The damped amplitudes are 1/sqrt(2), so the reconstruction leaves [0, 1]
    and must be evaluated with ``sequence_from_modes(..., clamp=False)``.
    """
    eps = float(eps)
    amp = 1.0 / np.sqrt(2.0)
    lam = 1.0j * (1.0 - eps)
    return ModeExpansion(((unit_amplitude, 1.0), (amp, lam), (amp, np.conj(lam))))


def damped_rotation_channel(eps: float) -> KrausChannel:
    """A pi/2 x-rotation followed by weak amplitude damping at rate eps.

    A physical (trace-preserving) realization of an almost-unitary qubit
    operation: F1 scales linearly and F2 quadratically in eps.
    """
    return compose_channels(
        make_unitary_channel(sqrt_x()), make_amplitude_damping(eps)
    )


# ---------------------------------------------------------------------------
# random instances (for property tests and validation suites)
# ---------------------------------------------------------------------------

def _inverse_sqrt_psd(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * (1.0 / np.sqrt(w))) @ v.conj().T


def random_channel(dim: int, rng: np.random.Generator, n_kraus: int | None = None,
                   real: bool = False) -> KrausChannel:
    """A random normalized channel from Ginibre Kraus operators.

    With ``real=True`` all Kraus operators have real entries, which restricts
    the dynamics to the real operator subspace of dimension d(d+1)/2.
    """
    n_kraus = n_kraus or dim * dim
    if real:
        raw = [rng.standard_normal((dim, dim)) for _ in range(n_kraus)]
    else:
        raw = [
            rng.standard_normal((dim, dim)) + 1.0j * rng.standard_normal((dim, dim))
            for _ in range(n_kraus)
        ]
    norm = _inverse_sqrt_psd(sum(a.conj().T @ a for a in raw))
    ops = tuple((a @ norm).conj().T for a in raw)
    return KrausChannel(dim, ops)


def random_density(dim: int, rng: np.random.Generator, real: bool = False) -> DensityMatrix:
    g = rng.standard_normal((dim, dim))
    if not real:
        g = g + 1.0j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_measurement(dim: int, rng: np.random.Generator, real: bool = False) -> MeasurementOperator:
    g = rng.standard_normal((dim, dim))
    if not real:
        g = g + 1.0j * rng.standard_normal((dim, dim))
    h = 0.5 * (g + g.conj().T)
    w = np.linalg.eigvalsh(h)
    spread = w.max() - w.min()
    if spread < 1e-12:
        return MeasurementOperator(0.5 * np.eye(dim))
    return MeasurementOperator((h - w.min() * np.eye(dim)) / spread)


def random_chain(dim: int, rng: np.random.Generator) -> ClassicalChain:
    t = rng.random((dim, dim))
    t /= t.sum(axis=0, keepdims=True)
    init = rng.random(dim)
    init /= init.sum()
    return ClassicalChain(t, init, rng.random(dim))


# ---------------------------------------------------------------------------
# channel specification files
# ---------------------------------------------------------------------------

_PRESET_RE = re.compile(r"^([a-z_]+)(?:\(([^)]*)\))?$")


def _preset_channel(name: str, args: list[float]) -> KrausChannel:
    if name == "sqrt_x":
        return make_unitary_channel(sqrt_x())
    if name == "x_rotation":
        if len(args) != 1:
            raise ChannelSpecError("x_rotation takes one angle argument")
        return make_unitary_channel(x_rotation(args[0]))
    if name == "identity":
        return identity_channel(int(args[0]) if args else 2)
    if name == "amplitude_damping":
        if len(args) != 1:
            raise ChannelSpecError("amplitude_damping takes one rate argument")
        return make_amplitude_damping(args[0])
    if name == "phase_damping":
        if len(args) != 1:
            raise ChannelSpecError("phase_damping takes one rate argument")
        return make_phase_damping(args[0])
    if name == "depolarizing":
        if len(args) != 1:
            raise ChannelSpecError("depolarizing takes one rate argument")
        return make_depolarizing(args[0])
    raise ChannelSpecError(f"unknown channel preset {name!r}")


def _decode_entry(entry) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ChannelSpecError(f"matrix entry must be a number or [re, im], got {entry!r}")


def _decode_matrix(rows, dim: int, what: str) -> np.ndarray:
    try:
        mat = np.array([[_decode_entry(e) for e in row] for row in rows], dtype=complex)
    except (TypeError, ChannelSpecError) as exc:
        raise ChannelSpecError(f"bad {what}: {exc}") from exc
    if mat.shape != (dim, dim):
        raise ChannelSpecError(f"{what} must be {dim}x{dim}, got {mat.shape}")
    return mat


def parse_channel(spec, relaxed: bool = False) -> KrausChannel:
    """Build a channel from a spec: a preset string, a dict, or a JSON string.

    Dict forms:
      {"dim": d, "kraus": [matrix, ...]}   matrices as rows of [re, im] pairs
      {"dim": d, "unitary": matrix}
    An optional "relaxed": true (or the ``relaxed`` argument) admits
    sub-normalized Kraus sets; otherwise non-normalized channels are rejected.
    """
    if isinstance(spec, str):
        stripped = spec.strip()
        if stripped.startswith("{"):
            try:
                spec = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ChannelSpecError(f"invalid channel JSON: {exc}") from exc
        else:
            m = _PRESET_RE.match(stripped)
            if not m:
                raise ChannelSpecError(f"unrecognized channel preset {spec!r}")
            args = []
            if m.group(2):
                try:
                    args = [float(x) for x in m.group(2).split(",")]
                except ValueError as exc:
                    raise ChannelSpecError(f"bad preset argument in {spec!r}") from exc
            return _preset_channel(m.group(1), args)
    if not isinstance(spec, dict):
        raise ChannelSpecError(f"channel spec must be a string or object, got {type(spec)}")
    if "dim" not in spec:
        raise ChannelSpecError('channel spec needs a "dim" field')
    dim = int(spec["dim"])
    relaxed = bool(spec.get("relaxed", relaxed))
    if "unitary" in spec:
        return make_unitary_channel(_decode_matrix(spec["unitary"], dim, "unitary"))
    if "kraus" in spec:
        ops = tuple(
            _decode_matrix(rows, dim, f"Kraus operator {i}")
            for i, rows in enumerate(spec["kraus"])
        )
        try:
            return KrausChannel(dim, ops, relaxed=relaxed)
        except ValueError as exc:
            raise ChannelSpecError(str(exc)) from exc
    raise ChannelSpecError('channel spec needs a "kraus" or "unitary" field')


def channel_to_spec(ch: KrausChannel) -> dict:
    """Serialize a channel to the dict form accepted by ``parse_channel``."""
    kraus = [
        [[[float(z.real), float(z.imag)] for z in row] for row in k]
        for k in ch.kraus_ops
    ]
    spec = {"dim": ch.dim, "kraus": kraus}
    if ch.relaxed:
        spec["relaxed"] = True
    return spec
