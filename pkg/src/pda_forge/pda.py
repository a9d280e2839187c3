"""Placement delivery arrays.

A (K, F, Z, S) PDA is an F x K array over ``{*} | [S]`` such that

C1  every column has exactly Z stars,
C2  every symbol in [S] occurs at least once,
C3  two equal symbols sit in distinct rows and columns, and the two cells
    crossing them are stars.

Arrays are held as ``int64`` numpy grids where 0 is the star and symbols are
1-based. Construction-1 arrays also keep their ``(c, j)`` pair labels, which
map to plain symbols through ``(j - 1) * v + c + 1``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .nhslr import Nhslr, verify_nhslr
from .report import VerificationReport
from .scheme import ParameterError, SchemeParams

STAR = 0


@dataclass(frozen=True, eq=False)
class Pda:
    cells: np.ndarray
    Z: int
    S: int
    pair_labels: np.ndarray | None = None

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.ndim != 2 or cells.shape[0] == 0 or cells.shape[1] == 0:
            raise ValueError(f"PDA grid must be a non-empty 2-D array, got shape {cells.shape}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        if self.pair_labels is not None:
            labels = np.asarray(self.pair_labels, dtype=np.int64)
            if labels.shape != cells.shape + (2,):
                raise ValueError("pair_labels must have shape (F, K, 2)")
            labels.setflags(write=False)
            object.__setattr__(self, "pair_labels", labels)

    @property
    def F(self) -> int:
        return self.cells.shape[0]

    @property
    def K(self) -> int:
        return self.cells.shape[1]

    @property
    def shape_params(self) -> tuple[int, int, int, int]:
        return (self.K, self.F, self.Z, self.S)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pda):
            return NotImplemented
        return (
            self.Z == other.Z
            and self.S == other.S
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self) -> int:
        return hash((self.Z, self.S, self.cells.tobytes()))

    def with_cell(self, j: int, k: int, value: int | str) -> Pda:
        """Copy with one cell replaced (``"*"`` or a symbol); drops pair labels."""
        cells = self.cells.copy()
        cells[j, k] = STAR if value == "*" else int(value)
        return Pda(cells, self.Z, self.S)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Any]], Z: int | None = None, S: int | None = None
    ) -> Pda:
        """Parse rows of ``"*"``/int. Undeclared Z and S are read off column 0
        and the largest symbol."""
        cells = np.array([[STAR if x == "*" else int(x) for x in row] for row in rows], dtype=np.int64)
        if Z is None:
            Z = int(np.count_nonzero(cells[:, 0] == STAR))
        if S is None:
            S = int(cells.max(initial=0))
        return cls(cells, Z, S)

    def rows(self) -> list[list[Any]]:
        return [["*" if x == STAR else int(x) for x in row] for row in self.cells]

    def to_dict(self) -> dict:
        doc: dict[str, Any] = {"K": self.K, "F": self.F, "Z": self.Z, "S": self.S, "rows": self.rows()}
        if self.pair_labels is not None:
            doc["pair_labels"] = [
                [None if self.cells[j, k] == STAR else [int(x) for x in self.pair_labels[j, k]]
                 for k in range(self.K)]
                for j in range(self.F)
            ]
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> Pda:
        rows = doc["rows"]
        cells = np.array([[STAR if x == "*" else int(x) for x in row] for row in rows], dtype=np.int64)
        if cells.ndim != 2:
            raise ValueError("PDA rows must all have the same length")
        if cells.shape != (int(doc["F"]), int(doc["K"])):
            raise ValueError(f"declared F x K = {doc['F']} x {doc['K']} but grid is {cells.shape}")
        labels = None
        if doc.get("pair_labels") is not None:
            labels = np.array(
                [[(-1, -1) if x is None else tuple(x) for x in row] for row in doc["pair_labels"]],
                dtype=np.int64,
            )
        return cls(cells, int(doc["Z"]), int(doc["S"]), labels)


def encode_pair(c: int, j: int, v: int) -> int:
    """Symbol for pair label ``(c, j)`` with ``c in Z_v`` and 1-based ``j``."""
    return (j - 1) * v + c + 1


def decode_pair(s: int, v: int) -> tuple[int, int]:
    return (s - 1) % v, (s - 1) // v + 1


def _symbol_groups(cells: np.ndarray, top: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # positions of symbols 1..top sorted by symbol; returns (symbols, rows, cols, counts)
    K = cells.shape[1]
    flat = cells.ravel()
    idx = np.flatnonzero((flat > 0) & (flat <= top))
    syms = flat[idx]
    order = np.argsort(syms, kind="stable")
    idx, syms = idx[order], syms[order]
    counts = np.bincount(syms, minlength=top + 1)
    return syms, idx // K, idx % K, counts


def _c3_violations(cells: np.ndarray) -> list[tuple[int, tuple[int, int], tuple[int, int]]]:
    top = int(cells.max(initial=0))
    syms, rows, cols, counts = _symbol_groups(cells, top)
    starts = np.concatenate(([0], np.cumsum(counts)))[:-1]
    found: list[tuple[int, tuple[int, int], tuple[int, int]]] = []
    for c in np.unique(counts):
        if c < 2:
            continue
        members = np.flatnonzero(counts == c)
        pos = starts[members][:, None] + np.arange(c)[None, :]
        R, C = rows[pos], cols[pos]
        for a, b in itertools.combinations(range(int(c)), 2):
            r1, c1, r2, c2 = R[:, a], C[:, a], R[:, b], C[:, b]
            bad = (r1 == r2) | (c1 == c2) | (cells[r1, c2] != STAR) | (cells[r2, c1] != STAR)
            for t in np.flatnonzero(bad):
                found.append(
                    (int(members[t]), (int(r1[t]), int(c1[t])), (int(r2[t]), int(c2[t])))
                )
    found.sort()
    return found


def verify_pda(p: Pda) -> VerificationReport:
    """Check C1-C3 against the declared Z and S.

    Witnesses (0-based cells): ``C1`` lists ``(column, star_count)``; ``C2``
    lists missing symbols; ``alphabet`` lists ``(row, column, value)`` for
    entries outside ``[S]``; ``C3`` lists ``(symbol, cell, cell)`` pairs.
    ``details["occurrences"]`` gives each symbol's count, ``details["gain_profile"]``
    the histogram of those counts.
    """
    cells = p.cells
    stars = np.count_nonzero(cells == STAR, axis=0)
    c1 = [(int(k), int(stars[k])) for k in np.flatnonzero(stars != p.Z)]

    out_of_range = np.argwhere((cells < 0) | (cells > p.S))
    alphabet = [(int(j), int(k), int(cells[j, k])) for j, k in out_of_range]

    counts = np.bincount(cells[(cells > 0) & (cells <= p.S)], minlength=p.S + 1)[1:]
    c2 = [int(s) + 1 for s in np.flatnonzero(counts == 0)]

    c3 = _c3_violations(np.where(cells < 0, STAR, cells))

    profile = Counter(int(x) for x in counts)
    return VerificationReport(
        kind="pda",
        checks={"C1": not c1, "C2": not c2, "alphabet": not alphabet, "C3": not c3},
        witnesses={"C1": c1, "C2": c2, "alphabet": alphabet, "C3": c3},
        details={
            "K": p.K,
            "F": p.F,
            "Z": p.Z,
            "S": p.S,
            "occurrences": [int(x) for x in counts],
            "gain_profile": dict(sorted(profile.items())),
        },
    )


def params(p: Pda) -> SchemeParams:
    """Memory ratio Z/F and load S/F of the scheme a verified PDA defines."""
    report = verify_pda(p)
    report.require("PDA")
    profile = report.details["gain_profile"]
    gain = next(iter(profile)) if len(profile) == 1 else None
    return SchemeParams(K=p.K, F=p.F, Z=p.Z, S=p.S, gain=gain, gain_profile=dict(profile))


def pda_from_nhslr(d: Nhslr) -> Pda:
    """Rows ``f in [0, vg)``, columns ``k in [0, v)``: cell ``(f, k)`` holds
    ``(<f+k>_v, j)`` when ``<k-f>_v`` is entry ``j`` of NHSLR row ``f // v``,
    otherwise a star."""
    verify_nhslr(d).require("NHSLR")
    v, g, b = d.v, d.g, d.b
    where = np.full((g, v), -1, dtype=np.int64)
    for i, row in enumerate(d.rows):
        where[i, list(row)] = np.arange(b)
    f = np.arange(v * g)[:, None]
    k = np.arange(v)[None, :]
    j = where[f // v, (k - f) % v]
    c = (f + k) % v
    hit = j >= 0
    cells = np.where(hit, j * v + c + 1, STAR)
    labels = np.stack([np.where(hit, c, -1), np.where(hit, j + 1, -1)], axis=-1)
    return Pda(cells, Z=(v - b) * g, S=b * v, pair_labels=labels)


def conjugate(p: Pda) -> Pda:
    """Swap the roles of rows and symbols.

    Row ``s`` of the result has, in column ``k``, the (1-based) row index at
    which symbol ``s`` sits in column ``k`` of ``p``, or a star when ``s`` is
    absent from that column. A (K, F, Z, S) PDA becomes (K, S, S-(F-Z), F).
    """
    params(p)
    if not 0 < p.Z < p.F:
        raise ParameterError(f"conjugate needs 0 < Z < F, got Z={p.Z}, F={p.F}")
    out = np.full((p.S, p.K), STAR, dtype=np.int64)
    j, k = np.nonzero(p.cells)
    out[p.cells[j, k] - 1, k] = j + 1
    return Pda(out, Z=p.S - (p.F - p.Z), S=p.F)


def relabel_canonical(p: Pda) -> Pda:
    """Renumber symbols by first appearance in row-major order."""
    mapping: dict[int, int] = {}
    out = p.cells.copy()
    for j, k in zip(*np.nonzero(p.cells)):
        s = int(p.cells[j, k])
        out[j, k] = mapping.setdefault(s, len(mapping) + 1)
    return Pda(out, p.Z, p.S)


def mn_pda(K: int, t: int) -> Pda:
    """The MN array: rows are t-subsets of users (lexicographic), cell
    ``(T, k)`` is a star iff ``k in T``, else the index of ``T | {k}`` among
    the lexicographically ordered (t+1)-subsets."""
    if not 1 <= t < K:
        raise ParameterError(f"MN PDA needs 1 <= t < K, got K={K}, t={t}")
    row_sets = list(itertools.combinations(range(K), t))
    symbol = {s: n + 1 for n, s in enumerate(itertools.combinations(range(K), t + 1))}
    cells = np.zeros((len(row_sets), K), dtype=np.int64)
    for r, T in enumerate(row_sets):
        members = set(T)
        for k in range(K):
            if k not in members:
                cells[r, k] = symbol[tuple(sorted(members | {k}))]
    Z = sum(1 for T in row_sets if 0 in T)
    return Pda(cells, Z=Z, S=len(symbol))


def pad_even_k(k: int) -> int:
    """Modulus for an even user count: add one virtual user."""
    if k < 2 or k % 2:
        raise ParameterError(f"padding applies to even user counts >= 2, got {k}")
    return k + 1


def restrict_users(p: Pda, k_real: int) -> Pda:
    """Drop trailing (virtual) columns, keeping the declared Z and S."""
    if not 1 <= k_real <= p.K:
        raise ParameterError(f"k_real must be in [1, {p.K}], got {k_real}")
    labels = None if p.pair_labels is None else p.pair_labels[:, :k_real]
    return Pda(p.cells[:, :k_real], p.Z, p.S, labels)
