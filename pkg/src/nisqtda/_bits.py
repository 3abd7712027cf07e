"""Bit-level helpers shared by the statevector kernels.

Basis index ``b`` encodes a simplex: bit ``i`` (LSB = vertex 0) is set iff
vertex ``i`` is present.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def popcounts(n: int) -> np.ndarray:
    """Popcount of every index in ``[0, 2**n)`` as uint8."""
    out = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        out = np.concatenate([out, out + 1])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def parity_signs(i: int) -> np.ndarray:
    """``(-1)**popcount(b)`` for ``b`` in ``[0, 2**i)``.

    This is the Jordan-Wigner sign of a fermion at mode ``i`` when the
    lower modes are occupied as in ``b``.
    """
    out = np.ones(1, dtype=np.float64)
    for _ in range(i):
        out = np.concatenate([out, -out])
    out.setflags(write=False)
    return out


def hadamard_column(n: int, flips: int) -> np.ndarray:
    """Real amplitudes ``(-1)**popcount(b & flips) / 2**(n/2)``."""
    col = np.ones(1, dtype=np.float64)
    for q in range(n):
        factor = -1.0 if (flips >> q) & 1 else 1.0
        # bit q is the most significant bit of the new block
        col = np.concatenate([col, factor * col])
    return col / np.sqrt(2.0**n)


def bitstring(b: int, n: int) -> str:
    """LSB-first bitstring: character ``q`` is qubit/vertex ``q``."""
    return "".join("1" if (b >> q) & 1 else "0" for q in range(n))


def parse_bitstring(s: str) -> int:
    return sum(1 << q for q, ch in enumerate(s) if ch == "1")
