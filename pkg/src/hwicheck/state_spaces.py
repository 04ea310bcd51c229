"""Finite state spaces: the Boolean hypercube {0,1}^N and the cycle Z/NZ.

Hypercube states are indexed 0..2^N-1 by binary encoding; coordinate i is
bit i (LSB = coordinate 0), so flipping a coordinate is an XOR with 1<<i.
Torus states are the residues 0..N-1 with graph distance around the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HYPERCUBE_MAX_N = 20
TORUS_MAX_N = 4096

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


@dataclass(frozen=True)
class StateSpace:
    """One of the two supported spaces; immutable."""

    kind: str  # "hypercube" | "torus"
    n: int

    @property
    def size(self) -> int:
        return (1 << self.n) if self.kind == "hypercube" else self.n

    @property
    def diameter(self) -> int:
        return self.n if self.kind == "hypercube" else self.n // 2

    def __str__(self) -> str:
        return f"{self.kind}({self.n})"


def hypercube(n: int) -> StateSpace:
    if not 1 <= n <= HYPERCUBE_MAX_N:
        raise ValueError(
            f"hypercube dimension must be in [1, {HYPERCUBE_MAX_N}], got {n}"
        )
    return StateSpace("hypercube", n)


def torus(n: int) -> StateSpace:
    if not 2 <= n <= TORUS_MAX_N:
        raise ValueError(f"torus size must be in [2, {TORUS_MAX_N}], got {n}")
    return StateSpace("torus", n)


def _check_index(space: StateSpace, x: int) -> None:
    if not 0 <= x < space.size:
        raise ValueError(f"state index {x} out of range for {space}")


def distance(space: StateSpace, x: int, y: int) -> int:
    """Graph distance: Hamming on the hypercube, arc length on the torus."""
    _check_index(space, x)
    _check_index(space, y)
    if space.kind == "hypercube":
        return bin(x ^ y).count("1")
    k = abs(x - y)
    return min(k, space.n - k)


def flip(space: StateSpace, x: int, i: int) -> int:
    """x with coordinate i toggled; hypercube only."""
    if space.kind != "hypercube":
        raise ValueError("flip is defined on hypercube spaces only")
    _check_index(space, x)
    if not 0 <= i < space.n:
        raise ValueError(f"coordinate {i} out of range for {space}")
    return x ^ (1 << i)


def neighbors(space: StateSpace, x: int) -> list[int]:
    """Distinct states at distance 1 (torus N=2 has a single neighbor)."""
    _check_index(space, x)
    if space.kind == "hypercube":
        return [x ^ (1 << i) for i in range(space.n)]
    n = space.n
    if n == 2:
        return [1 - x]
    return [(x + 1) % n, (x - 1) % n]


def distance_matrix(space: StateSpace) -> np.ndarray:
    """Dense size x size matrix of graph distances (int64)."""
    size = space.size
    if space.kind == "hypercube":
        idx = np.arange(size, dtype=np.uint32)
        xor = np.bitwise_xor.outer(idx, idx)
        out = np.zeros((size, size), dtype=np.int64)
        for shift in range(0, 32, 8):
            out += _POPCOUNT8[(xor >> shift) & 0xFF]
        return out
    idx = np.arange(size, dtype=np.int64)
    diff = np.abs(idx[:, None] - idx[None, :])
    return np.minimum(diff, size - diff)
