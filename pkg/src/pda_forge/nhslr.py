"""Non-half-sum Latin rectangles.

A ``g x b`` array over Z_v (v odd) is a (v, g, b) NHSLR when

* every residue appears at most once per row and per column, and
* for any two rows ``d, d'`` no entry of the half-sum vector ``(d + d') / 2``
  occurs in ``d`` or ``d'``.

The AXB family builds one for any ``m = (m_1, ..., m_n)``: rows of ``A`` are
the sign vectors ``{-1, 1}^n``, ``X = diag(x_1, ..., x_n)`` with
``x_i = prod_{j<i} (m_j + 1)``, and the columns of ``B`` run over
``[m_1] x ... x [m_n]``. The product is reduced modulo any odd
``v >= prod (m_i + 1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterator, Sequence

from .report import VerificationReport
from .scheme import ParameterError, SchemeParams
from .znum import Modulus, as_modulus, floor_root


@dataclass(frozen=True)
class Nhslr:
    modulus: Modulus
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ValueError("an NHSLR needs at least one row")
        width = len(self.rows[0])
        if width == 0:
            raise ValueError("an NHSLR needs at least one column")
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} entries, expected {width}")
            for x in row:
                if not 0 <= x < self.modulus.v:
                    raise ValueError(
                        f"entry {x} in row {i} is not canonical modulo {self.modulus.v}"
                    )

    @classmethod
    def from_integers(cls, v: int | Modulus, rows: Sequence[Sequence[int]]) -> Nhslr:
        """Build from arbitrary integers, reducing each entry modulo ``v``."""
        m = as_modulus(v)
        return cls(m, tuple(tuple(int(x) % m.v for x in row) for row in rows))

    @property
    def v(self) -> int:
        return self.modulus.v

    @property
    def g(self) -> int:
        return len(self.rows)

    @property
    def b(self) -> int:
        return len(self.rows[0])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def permute_columns(self, order: Sequence[int]) -> Nhslr:
        return Nhslr(self.modulus, tuple(tuple(row[j] for j in order) for row in self.rows))

    def to_dict(self) -> dict:
        return {"v": self.v, "g": self.g, "b": self.b, "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, doc: dict) -> Nhslr:
        d = cls(Modulus(int(doc["v"])), tuple(tuple(int(x) for x in r) for r in doc["rows"]))
        if "g" in doc and int(doc["g"]) != d.g:
            raise ValueError(f"declared g={doc['g']} but document has {d.g} rows")
        if "b" in doc and int(doc["b"]) != d.b:
            raise ValueError(f"declared b={doc['b']} but rows have {d.b} columns")
        return d


def half_sum_vector(d: Nhslr, i: int, i2: int) -> tuple[int, ...]:
    """Entrywise half-sum of rows ``i`` and ``i2``."""
    hs = d.modulus.half_sum
    return tuple(hs(a, b) for a, b in zip(d.rows[i], d.rows[i2]))


def verify_nhslr(d: Nhslr) -> VerificationReport:
    """Check both NHSLR conditions and collect every violation.

    Witnesses use 0-based indices. Latin witnesses are ``("row", i, value)``
    or ``("column", j, value)`` for a repeated value; half-sum witnesses are
    ``(i, i2, j)`` with ``i < i2`` when the half-sum of column ``j`` of rows
    ``i, i2`` lands in row ``i`` or ``i2``.
    """
    latin: list[tuple] = []
    for i, row in enumerate(d.rows):
        for value in sorted({x for x in row if row.count(x) > 1}):
            latin.append(("row", i, value))
    for j in range(d.b):
        col = d.column(j)
        for value in sorted({x for x in col if col.count(x) > 1}):
            latin.append(("column", j, value))

    row_sets = [set(r) for r in d.rows]
    half: list[tuple[int, int, int]] = []
    for i, i2 in itertools.combinations(range(d.g), 2):
        forbidden = row_sets[i] | row_sets[i2]
        for j, h in enumerate(half_sum_vector(d, i, i2)):
            if h in forbidden:
                half.append((i, i2, j))

    return VerificationReport(
        kind="nhslr",
        checks={"latin": not latin, "half_sum": not half},
        witnesses={"latin": latin, "half_sum": half},
        details={"v": d.v, "g": d.g, "b": d.b},
    )


@dataclass(frozen=True)
class AxbSpec:
    """Parameters of the AXB construction. ``v=None`` means pick automatically."""

    m: tuple[int, ...]
    v: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.m:
            raise ParameterError("m must have at least one component")
        if any(x < 1 for x in self.m):
            raise ParameterError(f"every m_i must be a positive integer, got {self.m}")
        if self.v is not None:
            if self.v % 2 == 0 or self.v < 3:
                raise ParameterError(f"v must be an odd integer >= 3, got {self.v}")
            if self.v < union_size(self):
                raise ParameterError(
                    f"v={self.v} is below prod(m_i + 1) = {union_size(self)}"
                )

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def g(self) -> int:
        return 2**self.n

    @property
    def b(self) -> int:
        return prod(self.m)

    @property
    def objective(self) -> int:
        return prod(self.m)

    def modulus(self) -> Modulus:
        if self.v is not None:
            return Modulus(self.v)
        return Modulus(smallest_odd_at_least(union_size(self)))

    def resolved(self) -> AxbSpec:
        return AxbSpec(self.m, self.modulus().v)


def smallest_odd_at_least(x: int) -> int:
    x = max(x, 3)
    return x if x % 2 else x + 1


def union_size(spec: AxbSpec | Sequence[int]) -> int:
    """``prod (m_i + 1)``: how many residues a row and its half-sums can span."""
    m = spec.m if isinstance(spec, AxbSpec) else spec
    return prod(x + 1 for x in m)


def axb_weights(m: Sequence[int]) -> tuple[int, ...]:
    """Diagonal of X: ``x_1 = 1``, ``x_i = prod_{j<i} (m_j + 1)``."""
    xs = [1]
    for mi in m[:-1]:
        xs.append(xs[-1] * (mi + 1))
    return tuple(xs)


def sign_rows(n: int) -> list[tuple[int, ...]]:
    """Rows of A: a binary counter with the first coordinate most significant,
    bit 0 -> -1 and bit 1 -> +1, so ``(-1, ..., -1)`` comes first."""
    return [tuple(2 * bit - 1 for bit in bits) for bits in itertools.product((0, 1), repeat=n)]


def coefficient_columns(m: Sequence[int]) -> list[tuple[int, ...]]:
    """Columns of B in lexicographic order over ``[m_1] x ... x [m_n]``."""
    return list(itertools.product(*(range(1, mi + 1) for mi in m)))


def axb_integer_matrix(m: Sequence[int]) -> list[tuple[int, ...]]:
    """``A X B`` over the integers, before reduction."""
    xs = axb_weights(m)
    cols = coefficient_columns(m)
    return [
        tuple(sum(a * c * x for a, c, x in zip(signs, col, xs)) for col in cols)
        for signs in sign_rows(len(m))
    ]


def construct_axb(spec: AxbSpec) -> Nhslr:
    return Nhslr.from_integers(spec.modulus(), axb_integer_matrix(spec.m))


def optimize_closed_form(v: int | Modulus, n: int) -> AxbSpec:
    """Uniform choice ``m_i = floor(v ** (1/n) - 1)``."""
    v = as_modulus(v).v
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    m = floor_root(v, n) - 1
    if m < 1:
        raise ParameterError(f"n={n} is too large for v={v}: floor(v^(1/n) - 1) < 1")
    return AxbSpec((m,) * n, v)


def _nondecreasing_tuples(n: int, cap: int, lo: int) -> Iterator[tuple[int, ...]]:
    # tuples lo <= m_1 <= ... <= m_n with prod(m_i + 1) <= cap, lexicographic
    if n == 0:
        yield ()
        return
    m = lo
    while (m + 1) ** n <= cap:
        for rest in _nondecreasing_tuples(n - 1, cap // (m + 1), m):
            yield (m, *rest)
        m += 1


def optimize_exhaustive(v: int | Modulus, n: int) -> AxbSpec:
    """Maximize ``prod m_i`` subject to ``prod (m_i + 1) <= v`` by enumeration.

    The problem is symmetric, so only non-decreasing tuples are visited; the
    lexicographically smallest maximizer wins.
    """
    v = as_modulus(v).v
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    best: tuple[int, ...] | None = None
    best_f = 0
    for m in _nondecreasing_tuples(n, v, 1):
        f = prod(m)
        if f > best_f:
            best, best_f = m, f
    if best is None:
        raise ParameterError(f"no positive m with prod(m_i + 1) <= {v} at n={n}")
    return AxbSpec(best, v)


def scheme_params(d: Nhslr) -> SchemeParams:
    """Parameters of the PDA an NHSLR induces: ``(v, vg, (v-b)g, bv)``."""
    verify_nhslr(d).require("NHSLR")
    v, g, b = d.v, d.g, d.b
    return SchemeParams(K=v, F=v * g, Z=(v - b) * g, S=b * v, gain=g, gain_profile={g: b * v})
