"""Non-half-sum disjoint packings and their conversion to Latin rectangles."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .nhslr import Nhslr
from .report import VerificationReport
from .znum import Modulus, as_modulus


@dataclass(frozen=True)
class Nhsdp:
    """``z`` blocks of ``g`` residues each. Blocks keep their input order;
    residues inside a block are stored ascending."""

    modulus: Modulus
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("a packing needs at least one block")
        size = len(self.blocks[0])
        if size == 0:
            raise ValueError("blocks must be non-empty")
        canon = []
        for idx, block in enumerate(self.blocks):
            if len(block) != size:
                raise ValueError(f"block {idx} has {len(block)} residues, expected {size}")
            if len(set(block)) != len(block):
                raise ValueError(f"block {idx} repeats a residue: {block}")
            for x in block:
                if not 0 <= x < self.modulus.v:
                    raise ValueError(f"residue {x} in block {idx} is not canonical")
            canon.append(tuple(sorted(block)))
        object.__setattr__(self, "blocks", tuple(canon))

    @classmethod
    def of(cls, v: int | Modulus, blocks: Sequence[Sequence[int]]) -> Nhsdp:
        m = as_modulus(v)
        return cls(m, tuple(tuple(int(x) % m.v for x in b) for b in blocks))

    @property
    def v(self) -> int:
        return self.modulus.v

    @property
    def g(self) -> int:
        return len(self.blocks[0])

    @property
    def z(self) -> int:
        return len(self.blocks)

    def to_dict(self) -> dict:
        return {"v": self.v, "g": self.g, "blocks": [list(b) for b in self.blocks]}

    @classmethod
    def from_dict(cls, doc: dict) -> Nhsdp:
        p = cls(Modulus(int(doc["v"])), tuple(tuple(int(x) for x in b) for b in doc["blocks"]))
        if "g" in doc and int(doc["g"]) != p.g:
            raise ValueError(f"declared g={doc['g']} but blocks have {p.g} residues")
        return p


def verify_nhsdp(p: Nhsdp) -> VerificationReport:
    """Witnesses: ``(block_a, block_b, residue)`` for overlaps and
    ``(block, a, b, half)`` when ``half = (a+b)/2`` lands in some block."""
    overlaps: list[tuple[int, int, int]] = []
    for ia, ib in itertools.combinations(range(p.z), 2):
        for x in sorted(set(p.blocks[ia]) & set(p.blocks[ib])):
            overlaps.append((ia, ib, x))

    covered = set().union(*p.blocks)
    half: list[tuple[int, int, int, int]] = []
    for idx, block in enumerate(p.blocks):
        for a, b in itertools.combinations(block, 2):
            h = p.modulus.half_sum(a, b)
            if h in covered:
                half.append((idx, a, b, h))

    return VerificationReport(
        kind="nhsdp",
        checks={"disjoint": not overlaps, "half_sum": not half},
        witnesses={"disjoint": overlaps, "half_sum": half},
        details={"v": p.v, "g": p.g, "z": p.z},
    )


def cyclic_shift(vec: Sequence[int], k: int) -> tuple[int, ...]:
    """Move the entry at index ``i`` to index ``(i - k) mod g``."""
    g = len(vec)
    return tuple(vec[(i + k) % g] for i in range(g))


def nhsdp_to_nhslr(p: Nhsdp) -> Nhslr:
    """Each block, as an ascending column, contributes its ``g`` cyclic shifts
    as consecutive columns; blocks are concatenated in input order, giving a
    ``g x gz`` array. Reordering blocks only permutes columns."""
    verify_nhsdp(p).require("NHSDP")
    columns = [cyclic_shift(block, k) for block in p.blocks for k in range(p.g)]
    rows = tuple(tuple(col[i] for col in columns) for i in range(p.g))
    return Nhslr(p.modulus, rows)
