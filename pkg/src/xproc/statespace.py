"""Marble configurations and enumerated level slices.

A configuration of black/white marbles on n vertices is packed into an
n-bit word. Vertex 0 is the *leftmost* character of the fixed-width binary
string, i.e. vertex v occupies bit position n-1-v of the word. The level
slice with exactly l black marbles is enumerated in ascending word order,
once, and every matrix and vector downstream indexes against that order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_STATE_CAP = 20000


class StateCapExceeded(RuntimeError):
    """A level slice is larger than the configured state cap."""

    def __init__(self, n: int, level: int, size: int, cap: int):
        super().__init__(
            f"level slice C({n},{level}) has {size} states, exceeding the cap {cap} "
            f"(set XPROC_STATE_CAP to raise it)"
        )
        self.n = n
        self.level = level
        self.size = size
        self.cap = cap


def state_cap() -> int:
    """Current state cap; XPROC_STATE_CAP overrides the default of 20000."""
    raw = os.environ.get("XPROC_STATE_CAP")
    return int(raw) if raw else DEFAULT_STATE_CAP


def bit_position(n: int, v: int) -> int:
    return n - 1 - v


@dataclass(frozen=True)
class Configuration:
    """An n-bit marble placement; bit value 1 marks a black marble."""

    n: int
    word: int

    def __post_init__(self):
        if not (2 <= self.n <= 63):
            raise ValueError(f"supported vertex counts are 2..63, got {self.n}")
        if not (0 <= self.word < (1 << self.n)):
            raise ValueError(f"word {self.word} out of range for n={self.n}")

    def get(self, v: int) -> int:
        if not (0 <= v < self.n):
            raise ValueError(f"vertex {v} out of range for n={self.n}")
        return (self.word >> bit_position(self.n, v)) & 1

    def weight(self) -> int:
        """Number of black marbles."""
        return self.word.bit_count()

    def to_string(self) -> str:
        return format(self.word, f"0{self.n}b")

    @classmethod
    def from_string(cls, bits: str) -> "Configuration":
        if set(bits) - {"0", "1"}:
            raise ValueError(f"configuration string must be binary, got {bits!r}")
        return cls(len(bits), int(bits, 2))


def flip_vertex(x: Configuration, v: int) -> Configuration:
    """Recolor the marble at vertex v; the weight changes by exactly one."""
    if not (0 <= v < x.n):
        raise ValueError(f"vertex {v} out of range for n={x.n}")
    return Configuration(x.n, x.word ^ (1 << bit_position(x.n, v)))


def swap_word(word: int, n: int, u: int, v: int) -> int:
    """Word with the marbles at u and v interchanged (no bounds checks)."""
    bu = bit_position(n, u)
    bv = bit_position(n, v)
    if ((word >> bu) ^ (word >> bv)) & 1:
        return word ^ ((1 << bu) | (1 << bv))
    return word


def swap_edge(x: Configuration, e: tuple[int, int]) -> Configuration:
    """Interchange the marbles at the endpoints of e; fixes x iff they match."""
    u, v = e[0], e[1]
    if not (0 <= u < x.n and 0 <= v < x.n):
        raise ValueError(f"edge ({u}, {v}) out of range for n={x.n}")
    return Configuration(x.n, swap_word(x.word, x.n, u, v))


def is_below(y: Configuration, x: Configuration) -> bool:
    """True iff every black marble of y sits where x also has one."""
    if y.n != x.n:
        raise ValueError(f"length mismatch: {y.n} vs {x.n}")
    return (y.word & ~x.word) == 0


@dataclass(frozen=True, eq=False)
class LevelStateSpace:
    """All C(n, level) configurations with a fixed number of black marbles."""

    n: int
    level: int
    words: np.ndarray          # sorted ascending, dtype int64
    index: dict[int, int]      # word -> position in words

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def states(self) -> list[Configuration]:
        return [Configuration(self.n, int(w)) for w in self.words]

    def weight(self) -> float:
        """Uniform probability of each state."""
        return 1.0 / self.size

    def position(self, x: Configuration) -> int:
        return self.index[x.word]


@lru_cache(maxsize=256)
def _level_words(n: int, level: int) -> tuple[int, ...]:
    # Gosper's hack walks the words of a fixed popcount in ascending order.
    if level == 0:
        return (0,)
    out = []
    w = (1 << level) - 1
    top = 1 << n
    while w < top:
        out.append(w)
        c = w & -w
        r = w + c
        w = (((r ^ w) >> 2) // c) | r
    return tuple(out)


def enumerate_level(n: int, level: int) -> LevelStateSpace:
    """Enumerate the level slice, ascending by word value.

    Raises StateCapExceeded before allocating anything when C(n, level)
    is over the configured cap.
    """
    if not (2 <= n <= 63):
        raise ValueError(f"supported vertex counts are 2..63, got {n}")
    if not (0 <= level <= n):
        raise ValueError(f"level must be in 0..{n}, got {level}")
    size = math.comb(n, level)
    cap = state_cap()
    if size > cap:
        raise StateCapExceeded(n, level, size, cap)
    words = np.array(_level_words(n, level), dtype=np.int64)
    index = {int(w): i for i, w in enumerate(words)}
    return LevelStateSpace(n, level, words, index)
