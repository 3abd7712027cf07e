"""Matrix-free fermionic boundary operator.

Annihilating vertex ``i`` from basis state ``b`` carries the sign
``(-1)**popcount(b & (2**i - 1))`` (Jordan-Wigner string on the lower
qubits).  ``B = sum_i a_i + a_i^dagger`` then squares to ``n * I``.

The ``_del``/``_del_dagger``/``_apply_B`` kernels take arrays whose axis 0
indexes the ``2**n`` basis states; any trailing axes are a batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ._bits import parity_signs
from .qstate import StateVector, _pauli_inplace


def _split(amps: np.ndarray, n: int, i: int) -> np.ndarray:
    return amps.reshape((1 << (n - i - 1), 2, 1 << i) + amps.shape[1:])


def _sign(i: int, batch_ndim: int) -> np.ndarray:
    return parity_signs(i).reshape((1 << i,) + (1,) * batch_ndim)


def _del(amps: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(amps)
    for i in range(n):
        src, dst = _split(amps, n, i), _split(out, n, i)
        dst[:, 0] += _sign(i, amps.ndim - 1) * src[:, 1]
    return out


def _del_dagger(amps: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(amps)
    for i in range(n):
        src, dst = _split(amps, n, i), _split(out, n, i)
        dst[:, 1] += _sign(i, amps.ndim - 1) * src[:, 0]
    return out


def _apply_B(amps: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(amps)
    for i in range(n):
        src, dst = _split(amps, n, i), _split(out, n, i)
        s = _sign(i, amps.ndim - 1)
        dst[:, 0] += s * src[:, 1]
        dst[:, 1] += s * src[:, 0]
    return out


def apply_del(v: StateVector) -> StateVector:
    """Boundary map: each present vertex is removed with its alternating sign."""
    return StateVector(v.n, _del(v.amps, v.n))


def apply_del_dagger(v: StateVector) -> StateVector:
    """Coboundary map, the adjoint of :func:`apply_del`."""
    return StateVector(v.n, _del_dagger(v.amps, v.n))


def apply_B(v: StateVector) -> StateVector:
    """``B = del + del^dagger``; Hermitian with ``B @ B = n * I``."""
    return StateVector(v.n, _apply_B(v.amps, v.n))


@dataclass(frozen=True)
class BoundaryOp:
    """The operator ``B`` on ``n`` qubits; nothing is ever stored."""

    n: int

    def __call__(self, v: StateVector) -> StateVector:
        if v.n != self.n:
            raise ValueError(f"operator on n={self.n} applied to state with n={v.n}")
        return apply_B(v)

    def as_linear_operator(self) -> LinearOperator:
        dim = 1 << self.n
        return LinearOperator(
            (dim, dim),
            matvec=lambda x: _apply_B(np.asarray(x, dtype=np.complex128).reshape(dim), self.n),
            rmatvec=lambda x: _apply_B(np.asarray(x, dtype=np.complex128).reshape(dim), self.n),
            dtype=np.complex128,
        )


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Paulis; ``letters[q]`` acts on qubit ``q`` (LSB first)."""

    letters: str
    coefficient: complex = 1.0

    def __post_init__(self):
        if set(self.letters) - set("IXYZ"):
            raise ValueError(f"bad Pauli letters {self.letters!r}")
        if self.coefficient == 0:
            raise ValueError("coefficient must be nonzero")

    @property
    def n(self) -> int:
        return len(self.letters)

    def to_text(self) -> str:
        c = complex(self.coefficient)
        coeff = repr(c.real) if c.imag == 0 else repr(c)
        return f"{coeff} {self.letters}"

    @classmethod
    def from_text(cls, line: str) -> "PauliString":
        coeff, letters = line.split()
        return cls(letters, complex(coeff))


def pauli_strings_for_B(n: int) -> list[PauliString]:
    """String ``i`` is ``Z`` on qubits ``< i``, ``X`` on ``i``, identity above."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [PauliString("Z" * i + "X" + "I" * (n - i - 1), 1.0) for i in range(n)]


def apply_pauli_string(ps: PauliString, v: StateVector) -> StateVector:
    if ps.n != v.n:
        raise ValueError(f"dimension mismatch: string on {ps.n} qubits, state on {v.n}")
    amps = v.amps.copy()
    for q, letter in enumerate(ps.letters):
        if letter != "I":
            _pauli_inplace(amps, v.n, q, letter)
    return StateVector(v.n, amps * ps.coefficient)


def format_pauli_strings(strings: list[PauliString]) -> str:
    return "".join(ps.to_text() + "\n" for ps in strings)


def parse_pauli_strings(text: str) -> list[PauliString]:
    return [PauliString.from_text(line) for line in text.splitlines() if line.strip()]
