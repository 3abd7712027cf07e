"""Dense statevector substrate.

States are plain complex arrays of length ``2**n`` wrapped in
:class:`StateVector`.  Projections leave states sub-normalized on purpose:
the squared norm is the post-selection success probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ._bits import bitstring, hadamard_column, parse_bitstring

NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes for n={self.n}, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, n: int, b: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[b] = 1.0
        return cls(n, amps)

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        return cls(n, np.zeros(1 << n, dtype=np.complex128))

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def is_physical(self) -> bool:
        return self.norm2 <= 1.0 + NORM_TOL

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_n(self, other)
        return StateVector(self.n, self.amps + other.amps)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_n(self, other)
        return StateVector(self.n, self.amps - other.amps)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.n, self.amps * scalar)

    __rmul__ = __mul__

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return self.n == other.n and np.allclose(self.amps, other.amps, rtol=0, atol=atol)


def _check_same_n(a: StateVector, b: StateVector) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: n={a.n} vs n={b.n}")


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    pmeas: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "pmeas"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} outside [0, 1]")

    @property
    def is_zero(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.pmeas == 0


@dataclass
class Histogram:
    """Shot counts per basis index plus post-selection failures."""

    n: int
    counts: dict[int, int] = field(default_factory=dict)
    rejected: int = 0

    @property
    def shots(self) -> int:
        return sum(self.counts.values()) + self.rejected

    def distribution(self) -> dict[int, float]:
        """Outcome frequencies conditioned on acceptance."""
        accepted = sum(self.counts.values())
        if accepted == 0:
            return {}
        return {b: c / accepted for b, c in self.counts.items()}

    def to_json(self) -> str:
        payload: dict[str, int] = {bitstring(b, self.n): c for b, c in sorted(self.counts.items())}
        payload["_rejected"] = self.rejected
        payload["_shots"] = self.shots
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Histogram":
        payload = json.loads(text)
        shots = payload.pop("_shots")
        rejected = payload.pop("_rejected", 0)
        widths = {len(k) for k in payload}
        if len(widths) > 1:
            raise ValueError("bitstrings of differing width")
        n = widths.pop() if widths else 0
        hist = cls(n, {parse_bitstring(k): int(v) for k, v in payload.items()}, int(rejected))
        if hist.shots != shots:
            raise ValueError(f"counts sum to {hist.shots}, header says {shots}")
        return hist


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by ``(seed, stream)``.

    The same key always yields the same draws, independent of the order
    in which streams are consumed.
    """

    seed: int
    stream: int | tuple[int, ...] = 0

    def generator(self) -> np.random.Generator:
        key = self.stream if isinstance(self.stream, tuple) else (self.stream,)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def hadamard_state(n: int, flips: int) -> StateVector:
    """Column ``flips`` of the ``2**n`` Sylvester-Hadamard matrix, unit norm."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return StateVector(n, hadamard_column(n, flips))


def random_flips(rng, n: int) -> int:
    """Uniform n-bit integer (the classical NOT pattern before the Hadamard layer)."""
    gen = _as_generator(rng)
    out = 0
    for q in range(0, n, 32):
        width = min(32, n - q)
        out |= int(gen.integers(0, 1 << width)) << q
    return out


def inner(a: StateVector, b: StateVector) -> complex:
    """``<a|b>``, conjugate-linear in ``a``."""
    _check_same_n(a, b)
    return complex(np.vdot(a.amps, b.amps))


def sample_shots(v: StateVector, shots: int, rng) -> Histogram:
    """Measure ``v`` in the computational basis ``shots`` times.

    Missing norm (``1 - |v|^2``) is counted as rejected, i.e. failed
    post-selection.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(v.amps) ** 2
    total = probs.sum()
    if total > 1.0 + NORM_TOL:
        raise ValueError(f"state norm^2 {total} exceeds 1")
    probs = np.append(probs, max(0.0, 1.0 - total))
    probs /= probs.sum()
    draws = _as_generator(rng).multinomial(shots, probs)
    counts = {int(b): int(c) for b, c in enumerate(draws[:-1]) if c}
    return Histogram(v.n, counts, int(draws[-1]))


def _pauli_inplace(amps: np.ndarray, n: int, q: int, letter: str) -> np.ndarray:
    view = amps.reshape((1 << (n - q - 1), 2, 1 << q) + amps.shape[1:])
    if letter == "X":
        view[:, [0, 1]] = view[:, [1, 0]]
    elif letter == "Z":
        view[:, 1] *= -1
    elif letter == "Y":
        lo, hi = view[:, 0].copy(), view[:, 1].copy()
        view[:, 0] = -1j * hi
        view[:, 1] = 1j * lo
    elif letter != "I":
        raise ValueError(f"unknown Pauli letter {letter!r}")
    return amps


def apply_pauli_error(v: StateVector, qubits: int | Iterable[int], paulis: str | Iterable[str]) -> StateVector:
    """Apply single-qubit Paulis, e.g. ``apply_pauli_error(v, [0, 3], "XZ")``."""
    if isinstance(qubits, int):
        qubits = [qubits]
    qubits, paulis = list(qubits), list(paulis)
    if len(qubits) != len(paulis):
        raise ValueError("need one Pauli letter per qubit")
    amps = v.amps.copy()
    for q, letter in zip(qubits, paulis):
        if not 0 <= q < v.n:
            raise ValueError(f"qubit {q} out of range for n={v.n}")
        _pauli_inplace(amps, v.n, q, letter)
    return StateVector(v.n, amps)


def _as_distribution(p) -> dict[int, float]:
    if isinstance(p, Histogram):
        return p.distribution()
    if isinstance(p, Mapping):
        items = dict(p)
    else:
        items = {i: float(x) for i, x in enumerate(np.asarray(p, dtype=float))}
    total = sum(items.values())
    if total <= 0:
        raise ValueError("distribution has no mass")
    return {k: v / total for k, v in items.items()}


def hellinger(p, q) -> float:
    """Hellinger distance ``sqrt(1/2 * sum (sqrt p - sqrt q)^2)``."""
    p, q = _as_distribution(p), _as_distribution(q)
    keys = set(p) | set(q)
    h2 = 0.5 * sum((math.sqrt(p.get(b, 0.0)) - math.sqrt(q.get(b, 0.0))) ** 2 for b in keys)
    return min(1.0, math.sqrt(max(0.0, h2)))
