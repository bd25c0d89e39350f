"""
Idealized nested lattice: fine lattice Zⁿ, coarse lattice qZⁿ.

Reduction mod the coarse lattice is componentwise mod q, so codewords are words
over Z_q and the mapping g between messages and codewords is the base-q digit
expansion (least significant digit first).
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from twrc.helper.exceptions import DomainError


@dataclass(frozen=True)
class LatticeWord:
    symbols: Tuple[int, ...]
    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise DomainError(f"modulus q must be an integer >= 2, got {self.q!r}")
        symbols = tuple(int(s) for s in self.symbols)
        if not symbols:
            raise DomainError("lattice words need length n >= 1")
        if any(s < 0 or s >= self.q for s in symbols):
            raise DomainError(f"symbols must lie in [0, {self.q - 1}], got {symbols}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "q", int(self.q))

    @classmethod
    def zero(cls, q: int, n: int) -> "LatticeWord":
        return cls((0,) * n, q)

    @classmethod
    def from_array(cls, symbols: np.ndarray, q: int) -> "LatticeWord":
        return cls(tuple(int(s) for s in np.asarray(symbols) % q), q)

    @property
    def n(self) -> int:
        return len(self.symbols)

    def as_array(self) -> np.ndarray:
        return np.array(self.symbols, dtype=np.int64)

    def __add__(self, other: "LatticeWord") -> "LatticeWord":
        return mod_add(self, other)

    def __sub__(self, other: "LatticeWord") -> "LatticeWord":
        return mod_sub(self, other)


def lattice_map_g(w: int, q: int, n: int) -> LatticeWord:
    if int(n) != n or n < 1:
        raise DomainError(f"block length n must be >= 1, got {n!r}")
    if int(q) != q or q < 2:
        raise DomainError(f"modulus q must be an integer >= 2, got {q!r}")
    if int(w) != w or not 0 <= w < q ** n:
        raise DomainError(f"message {w!r} outside [0, {q}^{n})")
    digits, rest = [], int(w)
    for _ in range(n):
        rest, digit = divmod(rest, q)
        digits.append(digit)
    return LatticeWord(tuple(digits), q)


def lattice_unmap_g(word: LatticeWord) -> int:
    value = 0
    for digit in reversed(word.symbols):
        value = value * word.q + digit
    return value


def _check_pair(a: LatticeWord, b: LatticeWord):
    if a.q != b.q or a.n != b.n:
        raise DomainError(f"words over (q={a.q}, n={a.n}) and (q={b.q}, n={b.n}) cannot be combined")


def mod_add(a: LatticeWord, b: LatticeWord) -> LatticeWord:
    _check_pair(a, b)
    return LatticeWord(tuple((x + y) % a.q for x, y in zip(a.symbols, b.symbols)), a.q)


def mod_sub(a: LatticeWord, b: LatticeWord) -> LatticeWord:
    _check_pair(a, b)
    return LatticeWord(tuple((x - y) % a.q for x, y in zip(a.symbols, b.symbols)), a.q)


def fits(width: int, q: int, n: int) -> bool:
    """Whether every width-bit message has a codeword: 2**width <= q**n."""
    return (1 << width) <= q ** n
