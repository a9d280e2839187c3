from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class ParameterError(ValueError):
    """Construction or calculator parameters outside their valid range."""


@dataclass(frozen=True)
class SchemeParams:
    """Caching-scheme quantities induced by a (K, F, Z, S) array.

    ``gain`` is the common occurrence count of every symbol when it is uniform,
    otherwise ``None``; ``gain_profile`` maps occurrence count to how many
    symbols have it.
    """

    K: int
    F: int
    Z: int
    S: int
    gain: int | None = None
    gain_profile: dict[int, int] = field(default_factory=dict, compare=False)

    @property
    def memory_ratio(self) -> Fraction:
        return Fraction(self.Z, self.F)

    @property
    def load(self) -> Fraction:
        return Fraction(self.S, self.F)

    @property
    def subpacketization(self) -> int:
        return self.F

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.K, self.F, self.Z, self.S)

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "F": self.F,
            "Z": self.Z,
            "S": self.S,
            "memory_ratio": str(self.memory_ratio),
            "load": str(self.load),
            "gain": self.gain,
            "gain_profile": {str(k): v for k, v in sorted(self.gain_profile.items())},
        }
