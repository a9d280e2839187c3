"""Residue arithmetic modulo an odd integer.

Everything the Latin-rectangle code needs lives here: canonical reduction,
the half-sum ``r`` with ``2r = a + b (mod v)``, and an integer-guarded
``floor(v ** (1/n))`` shared by the optimizer and the scheme calculators.
"""

from __future__ import annotations

from dataclasses import dataclass


class ModulusError(ValueError):
    """Raised for an even or too-small modulus, or when mixing moduli."""


@dataclass(frozen=True, order=True)
class Modulus:
    """An odd modulus ``v >= 3``. Division by 2 is a bijection on Z_v."""

    v: int

    def __post_init__(self) -> None:
        if isinstance(self.v, bool) or not isinstance(self.v, int):
            raise ModulusError(f"modulus must be an int, got {self.v!r}")
        if self.v < 3:
            raise ModulusError(f"modulus must be >= 3, got {self.v}")
        if self.v % 2 == 0:
            raise ModulusError(f"modulus must be odd, got {self.v}")

    @property
    def inv2(self) -> int:
        return (self.v + 1) // 2

    def reduce(self, x: int) -> int:
        return x % self.v

    def half(self, x: int) -> int:
        """Return ``x / 2`` in Z_v as a canonical int."""
        return (x * self.inv2) % self.v

    def half_sum(self, a: int, b: int) -> int:
        return ((a + b) * self.inv2) % self.v

    def __int__(self) -> int:
        return self.v


def as_modulus(v: int | Modulus) -> Modulus:
    return v if isinstance(v, Modulus) else Modulus(v)


@dataclass(frozen=True)
class Residue:
    value: int
    modulus: Modulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus.v:
            raise ValueError(
                f"residue {self.value} is not canonical modulo {self.modulus.v}"
            )

    def _check(self, other: Residue) -> None:
        if other.modulus != self.modulus:
            raise ModulusError(
                f"moduli differ: {self.modulus.v} vs {other.modulus.v}"
            )

    def __add__(self, other: Residue) -> Residue:
        self._check(other)
        return Residue((self.value + other.value) % self.modulus.v, self.modulus)

    def __sub__(self, other: Residue) -> Residue:
        self._check(other)
        return Residue((self.value - other.value) % self.modulus.v, self.modulus)

    def __neg__(self) -> Residue:
        return Residue((-self.value) % self.modulus.v, self.modulus)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


def reduce(x: int, m: int | Modulus) -> Residue:
    """Canonical representative of ``x`` in ``[0, v-1]``; negatives included."""
    m = as_modulus(m)
    return Residue(x % m.v, m)


def half_sum(a: Residue, b: Residue) -> Residue:
    """The unique ``r`` with ``2r = a + b (mod v)``."""
    a._check(b)
    return Residue(a.modulus.half_sum(a.value, b.value), a.modulus)


def floor_root(v: int, n: int) -> int:
    """Largest integer ``r >= 0`` with ``r ** n <= v``.

    Integer Newton iteration from an upper bound, so perfect powers such as
    343 (whose float cube root is 6.999...) floor correctly at any size.
    """
    if n < 1:
        raise ValueError(f"root degree must be >= 1, got {n}")
    if v < 0:
        raise ValueError(f"radicand must be >= 0, got {v}")
    if v < 2 or n == 1:
        return v
    r = 1 << -(-v.bit_length() // n)
    while True:
        nxt = ((n - 1) * r + v // r ** (n - 1)) // n
        if nxt >= r:
            return r
        r = nxt
