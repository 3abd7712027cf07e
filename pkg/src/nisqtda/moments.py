"""Power moments ``mu_l^(i) = <v_l| (Delta_k / n)^i |v_l>`` of the scaled Laplacian.

Each moment is the squared norm of

    phi^(i) = (prod_j P_Gamma P_k^(j % 2) B) P_Gamma P_k |v>

divided by ``n**i``.  Running the circuit with ``B / sqrt(n)`` (a unitary,
since ``B @ B = n I``) makes the moment a post-selection success
probability, which is how the shot and noisy modes sample it.

Random streams: the Hadamard column of vector ``l`` comes from stream
``(0, l)``; job ``(l, i)`` draws from stream ``(1, l * (m + 1) + i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from ._bits import hadamard_column
from .boundary import _apply_B
from .complexes import AdjacencyGraph
from .errors import ScaleCapError
from .projectors import _diag, complex_mask, order_mask, round_robin_schedule
from .qstate import Histogram, NoiseModel, RngStream, StateVector, _as_generator, random_flips
from .resources import block_costs, phi_block_sequence

MAX_STATEVECTOR_QUBITS = 24
# basis-size x batch elements processed at once in exact mode
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class MomentMode:
    kind: str = "exact"
    shots: int | None = None
    noise: NoiseModel | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "shots", "noisy"):
            raise ValueError(f"unknown moment mode {self.kind!r}")
        if self.kind != "exact" and (self.shots is None or self.shots < 1):
            raise ValueError(f"{self.kind} mode needs shots >= 1")
        if self.kind == "noisy" and self.noise is None:
            raise ValueError("noisy mode needs a NoiseModel")

    @classmethod
    def exact(cls) -> "MomentMode":
        return cls("exact")

    @classmethod
    def sampled(cls, shots: int) -> "MomentMode":
        return cls("shots", shots)

    @classmethod
    def noisy(cls, shots: int, noise: NoiseModel) -> "MomentMode":
        return cls("noisy", shots, noise)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.shots is not None:
            out["shots"] = self.shots
        if self.noise is not None:
            out["noise"] = {"p1": self.noise.p1, "p2": self.noise.p2, "pmeas": self.noise.pmeas}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "MomentMode":
        noise = NoiseModel(**d["noise"]) if "noise" in d else None
        return cls(d["kind"], d.get("shots"), noise)


@dataclass
class MomentTable:
    n: int
    k: int
    m: int
    n_v: int
    mu: np.ndarray  # (n_v, m + 1)
    mode: MomentMode = field(default_factory=MomentMode.exact)
    seed: int | None = None
    flips: list[int] = field(default_factory=list)
    include_null: bool = False

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self.mu.shape != (self.n_v, self.m + 1):
            raise ValueError(f"mu has shape {self.mu.shape}, expected {(self.n_v, self.m + 1)}")
        if np.any(self.mu < -1e-9) or np.any(self.mu > 1 + 1e-9):
            raise ValueError("moments must lie in [0, 1]")

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n, "k": self.k, "m": self.m, "n_v": self.n_v,
            "mode": self.mode.to_dict(), "seed": self.seed, "flips": self.flips,
            "include_null": self.include_null, "mu": self.mu.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "MomentTable":
        d = json.loads(text)
        return cls(d["n"], d["k"], d["m"], d["n_v"], np.array(d["mu"]),
                   MomentMode.from_dict(d["mode"]), d.get("seed"), d.get("flips", []),
                   d.get("include_null", False))


def _check(v: StateVector, g: AdjacencyGraph, i: int, k: int) -> None:
    if v.n != g.n:
        raise ValueError(f"state on n={v.n} but graph on n={g.n}")
    if i < 0:
        raise ValueError("power must be >= 0")
    if not 0 <= k <= g.n - 1:
        raise ValueError(f"order k={k} outside [0, {g.n - 1}]")


def _phi(amps: np.ndarray, n: int, i: int, keep: np.ndarray, order: np.ndarray, scale: float = 1.0):
    """Yield phi^(0), ..., phi^(i) (each ``B`` multiplied by ``scale``)."""
    x = _diag(amps, keep * order)
    yield x
    for j in range(i):
        x = _apply_B(x, n) * scale
        x = _diag(x, keep * order if j % 2 else keep)
        yield x


def phi_state(v: StateVector, i: int, g: AdjacencyGraph, k: int, include_null: bool = False) -> StateVector:
    _check(v, g, i, k)
    keep = complex_mask(g, include_null)
    *_, last = _phi(v.amps, v.n, i, keep, order_mask(v.n, k))
    return StateVector(v.n, last)


def moment_exact(v: StateVector, i: int, g: AdjacencyGraph, k: int, include_null: bool = False) -> float:
    return phi_state(v, i, g, k, include_null).norm2 / g.n ** i


def moment_shots(v: StateVector, i: int, g: AdjacencyGraph, k: int, shots: int, rng,
                 include_null: bool = False) -> float:
    """Fraction of ``shots`` post-selection successes, i.e. Binomial(T, mu) / T."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    mu = min(1.0, max(0.0, moment_exact(v, i, g, k, include_null)))
    return _as_generator(rng).binomial(shots, mu) / shots


def exact_moments(flips, g: AdjacencyGraph, k: int, m: int, include_null: bool = False) -> np.ndarray:
    """Exact ``mu[l, i]`` for Hadamard columns ``flips[l]``, batched over ``l``."""
    n = g.n
    keep = complex_mask(g, include_null)
    order = order_mask(n, k)
    flips = list(flips)
    out = np.empty((len(flips), m + 1))
    chunk = max(1, _CHUNK_ELEMENTS >> n)
    scale = 1.0 / math.sqrt(n)
    for start in range(0, len(flips), chunk):
        cols = flips[start:start + chunk]
        batch = np.stack([hadamard_column(n, f) for f in cols], axis=1)
        for i, x in enumerate(_phi(batch, n, m, keep, order, scale)):
            out[start:start + len(cols), i] = np.einsum("ij,ij->j", x, x)
    return out


# --- noisy trajectories -------------------------------------------------------

_OP_MASK, _OP_B, _OP_PAULI = 0, 1, 2


@numba.njit(cache=True)
def _run_trajectories(v, n, ops, args, masks, xerr, zerr, uniforms):  # pragma: no cover - jit
    big_n = v.size
    n_traj = xerr.shape[0]
    par = np.zeros(big_n, dtype=np.int8)
    for b in range(1, big_n):
        par[b] = par[b >> 1] ^ (b & 1)
    inv = 1.0 / math.sqrt(n)
    # signs[b, i] = (-1)^popcount(b below i), prescaled by 1/sqrt(n)
    signs = np.empty((big_n, n))
    for i in range(n):
        for b in range(big_n):
            signs[b, i] = inv * (1.0 - 2.0 * par[b & ((1 << i) - 1)])
    norms = np.empty(n_traj)
    outcomes = np.empty(n_traj, dtype=np.int64)
    s = np.empty(big_n)
    tmp = np.empty(big_n)
    for t in range(n_traj):
        s[:] = v
        for o in range(ops.size):
            kind = ops[o]
            a = args[o]
            if kind == 0:
                for b in range(big_n):
                    if masks[a, b] == 0:
                        s[b] = 0.0
            elif kind == 1:
                tmp[:] = 0.0
                for b in range(big_n):
                    val = s[b]
                    if val != 0.0:
                        for i in range(n):
                            tmp[b ^ (1 << i)] += signs[b, i] * val
                s, tmp = tmp, s
            else:
                x = xerr[t, a]
                z = zerr[t, a]
                if x != 0 or z != 0:
                    for b in range(big_n):
                        tmp[b ^ x] = s[b] * (1.0 - 2.0 * par[b & z])
                    s, tmp = tmp, s
        total = 0.0
        for b in range(big_n):
            total += s[b] * s[b]
        norms[t] = total
        # sample an outcome; -1 means post-selection failed
        u = uniforms[t]
        outcomes[t] = -1
        if u < total:
            acc = 0.0
            for b in range(big_n):
                acc += s[b] * s[b]
                if u < acc:
                    outcomes[t] = b
                    break
            if outcomes[t] == -1:
                outcomes[t] = big_n - 1
    return norms, outcomes


@lru_cache(maxsize=16)
def _round_masks(g: AdjacencyGraph, include_null: bool) -> np.ndarray:
    """One uint8 keep-mask per round-robin round; their product is ``P_Gamma``."""
    n = g.n
    b = np.arange(1 << n, dtype=np.int64)
    rounds = round_robin_schedule(n).rounds if n >= 2 else ((),)
    masks = np.ones((len(rounds), 1 << n), dtype=np.uint8)
    for r, rnd in enumerate(rounds):
        for i, j in rnd:
            if not g.has_edge(i, j):
                both = ((b >> i) & 1) & ((b >> j) & 1)
                masks[r, both == 1] = 0
    if not include_null:
        masks[-1, 0] = 0
    return masks


def _noisy_program(g: AdjacencyGraph, k: int, i: int, include_null: bool):
    """Op codes, op args, masks and the per-insertion (1q, 2q) gate counts."""
    n = g.n
    costs = block_costs(n, g, k)
    rounds = _round_masks(g, include_null)
    masks = np.vstack([order_mask(n, k).astype(np.uint8)[None, :], rounds])
    ops, args, gates = [], [], []

    def noise(g1, g2):
        ops.append(_OP_PAULI)
        args.append(len(gates))
        gates.append((g1, g2))

    noise(costs["prep"].gates, 0)
    for block in phi_block_sequence(i):
        if block == "P_k":
            ops.append(_OP_MASK)
            args.append(0)
            noise(0, costs["P_k"].two_qubit_gates)
        elif block == "P_Gamma":
            for r, rg in enumerate(costs["P_Gamma"].round_gates or (0,)):
                ops.append(_OP_MASK)
                args.append(1 + r)
                noise(0, rg)
        else:
            ops.append(_OP_B)
            args.append(0)
            noise(costs["B"].gates - costs["B"].two_qubit_gates, costs["B"].two_qubit_gates)
    return np.array(ops, np.int64), np.array(args, np.int64), masks, gates


def _draw_pauli_frames(gen: np.random.Generator, n: int, n_traj: int, gates, noise: NoiseModel):
    """Accumulated X/Z masks per (trajectory, insertion point); phases dropped."""
    xerr = np.zeros((n_traj, len(gates)), dtype=np.int64)
    zerr = np.zeros_like(xerr)
    for p, (g1, g2) in enumerate(gates):
        col_x, col_z = xerr[:, p], zerr[:, p]
        if g1 and noise.p1 > 0:
            counts = gen.binomial(g1, noise.p1, size=n_traj)
            traj = np.repeat(np.arange(n_traj), counts)
            q = gen.integers(0, n, size=traj.size)
            letter = gen.integers(1, 4, size=traj.size)  # 1=X 2=Y 3=Z
            np.bitwise_xor.at(col_x, traj, (letter <= 2).astype(np.int64) << q)
            np.bitwise_xor.at(col_z, traj, (letter >= 2).astype(np.int64) << q)
        if g2 and noise.p2 > 0:
            counts = gen.binomial(g2, noise.p2, size=n_traj)
            traj = np.repeat(np.arange(n_traj), counts)
            q1 = gen.integers(0, n, size=traj.size)
            q2 = (q1 + gen.integers(1, max(n, 2), size=traj.size)) % n
            pair = gen.integers(1, 16, size=traj.size)  # 15 non-identity two-qubit Paulis
            for q, letter in ((q1, pair % 4), (q2, pair // 4)):
                hit_x = ((letter == 1) | (letter == 2)).astype(np.int64)
                hit_z = ((letter == 2) | (letter == 3)).astype(np.int64)
                np.bitwise_xor.at(col_x, traj, hit_x << q)
                np.bitwise_xor.at(col_z, traj, hit_z << q)
    return xerr, zerr


def noisy_trajectories(v: StateVector, i: int, g: AdjacencyGraph, k: int, shots: int,
                       noise: NoiseModel, rng, include_null: bool = False):
    """Run ``shots`` stochastic-Pauli trajectories of the degree-``i`` circuit.

    Returns per-trajectory success probabilities and sampled outcomes
    (``-1`` for a failed post-selection), before any readout error.
    """
    _check(v, g, i, k)
    if np.abs(v.amps.imag).max(initial=0.0) > 0:
        raise ValueError("noisy trajectories expect a real input state")
    gen = _as_generator(rng)
    ops, args, masks, gates = _noisy_program(g, k, i, include_null)
    xerr, zerr = _draw_pauli_frames(gen, g.n, shots, gates, noise)
    uniforms = gen.random(shots)
    return _run_trajectories(np.ascontiguousarray(v.amps.real), g.n, ops, args, masks, xerr, zerr, uniforms)


def moment_noisy(v: StateVector, i: int, g: AdjacencyGraph, k: int, shots: int, noise: NoiseModel,
                 rng, include_null: bool = False) -> float:
    """Acceptance fraction over ``shots`` noisy trajectories.

    The flag readout is flipped with probability ``pmeas``.  With all
    error rates zero this is exactly :func:`moment_shots`.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    gen = _as_generator(rng)
    if noise.is_zero:
        return moment_shots(v, i, g, k, shots, gen, include_null)
    _, outcomes = noisy_trajectories(v, i, g, k, shots, noise, gen, include_null)
    accepted = outcomes >= 0
    if noise.pmeas > 0:
        accepted ^= gen.random(shots) < noise.pmeas
    return float(accepted.mean())


def noisy_outcome_histogram(v: StateVector, i: int, g: AdjacencyGraph, k: int, shots: int,
                            noise: NoiseModel, rng, include_null: bool = False) -> Histogram:
    """Measured simplex register of the degree-``i`` circuit under noise.

    Every readout bit, flag included, flips with probability ``pmeas``.
    """
    gen = _as_generator(rng)
    _, outcomes = noisy_trajectories(v, i, g, k, shots, noise, gen, include_null)
    accepted = outcomes >= 0
    if noise.pmeas > 0:
        accepted ^= gen.random(shots) < noise.pmeas
        flips = (gen.random((shots, g.n)) < noise.pmeas).astype(np.int64) << np.arange(g.n)
        outcomes = np.where(outcomes >= 0, outcomes, gen.integers(0, 1 << g.n, size=shots))
        outcomes = outcomes ^ flips.sum(axis=1)
    counts: dict[int, int] = {}
    for b in outcomes[accepted]:
        counts[int(b)] = counts.get(int(b), 0) + 1
    return Histogram(g.n, counts, int((~accepted).sum()))


def ideal_outcome_distribution(v: StateVector, i: int, g: AdjacencyGraph, k: int,
                               include_null: bool = False) -> dict[int, float]:
    phi = phi_state(v, i, g, k, include_null)
    probs = np.abs(phi.amps) ** 2
    total = probs.sum()
    if total == 0:
        return {}
    return {int(b): float(p / total) for b, p in enumerate(probs) if p > 0}


def build_moment_table(g: AdjacencyGraph, k: int, m: int, n_v: int, mode: MomentMode | None = None,
                       seed: int = 0, include_null: bool = False,
                       max_qubits: int = MAX_STATEVECTOR_QUBITS) -> MomentTable:
    """Moments for ``n_v`` random Hadamard vectors and powers ``0..m``."""
    mode = mode or MomentMode.exact()
    if g.n > max_qubits:
        raise ScaleCapError(f"n={g.n} exceeds the statevector cap of {max_qubits}")
    if m < 0 or n_v < 1:
        raise ValueError("need m >= 0 and n_v >= 1")
    if not 0 <= k <= g.n - 1:
        raise ValueError(f"order k={k} outside [0, {g.n - 1}]")
    flips = [random_flips(RngStream(seed, (0, l)), g.n) for l in range(n_v)]
    exact = exact_moments(flips, g, k, m, include_null)
    if mode.kind == "exact":
        mu = exact
    else:
        mu = np.empty_like(exact)
        for l, f in enumerate(flips):
            v = None
            for i in range(m + 1):
                stream = RngStream(seed, (1, l * (m + 1) + i)).generator()
                if mode.kind == "shots" or mode.noise.is_zero:
                    p = min(1.0, max(0.0, exact[l, i]))
                    mu[l, i] = stream.binomial(mode.shots, p) / mode.shots
                else:
                    if v is None:
                        v = StateVector(g.n, hadamard_column(g.n, f))
                    mu[l, i] = moment_noisy(v, i, g, k, mode.shots, mode.noise, stream, include_null)
    return MomentTable(g.n, k, m, n_v, mu, mode, seed, flips, include_null)


def subspace_dimension(g: AdjacencyGraph, k: int, include_null: bool = False) -> int:
    """``|S_k|`` read off the projector masks."""
    return int((complex_mask(g, include_null) * order_mask(g.n, k)).sum())

