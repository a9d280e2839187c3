"""Closed-form (K, M/N, R, F) calculators for linear and baseline schemes.

All quantities are exact (``Fraction``/``int``); decimals appear only when a
table is rendered. Every calculator raises ``ParameterError`` naming the
violated constraint.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from math import comb, factorial, prod
from typing import Callable, Iterable, Sequence

from .nhslr import AxbSpec, optimize_closed_form
from .scheme import ParameterError
from .znum import floor_root

Number = int | Fraction


@dataclass(frozen=True)
class SchemePoint:
    scheme: str
    parameters: str
    K: int
    memory_ratio: Fraction
    load: Fraction
    subpacketization: Number

    def __post_init__(self) -> None:
        if not 0 <= self.memory_ratio <= 1:
            raise ParameterError(f"{self.scheme} {self.parameters}: memory ratio {self.memory_ratio} outside [0, 1]")
        if self.load < 0:
            raise ParameterError(f"{self.scheme} {self.parameters}: negative load")
        if self.subpacketization < 1:
            raise ParameterError(f"{self.scheme} {self.parameters}: subpacketization below 1")


def _int_if_whole(x: Fraction) -> Number:
    return x.numerator if x.denominator == 1 else x


def _require(ok: bool, scheme: str, constraint: str) -> None:
    if not ok:
        raise ParameterError(f"{scheme}: constraint violated: {constraint}")


def ours(v: int, n: int) -> SchemePoint:
    """Uniform AXB scheme with ``m_i = floor(v^(1/n) - 1)``."""
    _require(v % 2 == 1 and v >= 3, "ours", "v odd, v >= 3")
    try:
        spec = optimize_closed_form(v, n)
    except ParameterError:
        raise ParameterError(f"ours: constraint violated: floor({v}^(1/{n}) - 1) >= 1") from None
    point = ours_spec(spec)
    return SchemePoint("ours", f"(v,n)=({v},{n})", point.K, point.memory_ratio, point.load, point.subpacketization)


def ours_spec(spec: AxbSpec) -> SchemePoint:
    """Any AXB spec: ``K = v``, ``M/N = 1 - prod m / v``, ``R = prod m / 2^n``, ``F = 2^n v``."""
    v = spec.modulus().v
    b, g = prod(spec.m), 2**spec.n
    m_text = ",".join(map(str, spec.m))
    return SchemePoint("ours", f"(v,m)=({v},({m_text}))", v, 1 - Fraction(b, v), Fraction(b, g), g * v)


def ours_conjugate(v: int, n: int) -> SchemePoint:
    """Conjugate of the uniform scheme: ``F = m^n v``, ``M/N = 1 - 2^n / v``,
    ``R = (2 / m)^n`` with ``m = floor(v^(1/n) - 1)``."""
    base = ours(v, n)
    g = 2**n
    b = base.load * g
    return SchemePoint(
        "ours conjugate", f"(v,n)=({v},{n})", v, 1 - Fraction(g, v), 1 / base.load, _int_if_whole(b * v)
    )


def mn(K: int, t: int) -> SchemePoint:
    _require(1 <= t < K, "MN", "1 <= t < K")
    return SchemePoint("MN", f"(K,t)=({K},{t})", K, Fraction(t, K), Fraction(K - t, t + 1), comb(K, t))


def wcwl(K: int, t: int) -> SchemePoint:
    _require(1 <= t < K, "WCWL", "1 <= t < K")
    label = f"(K,t)=({K},{t})"
    span = K - t + 1
    if K % span == 0 or K - t == 1:
        return SchemePoint("WCWL", label, K, Fraction(t, K), Fraction((K - t) * (K - t + 1), 2 * K), K)
    h = K // span
    if K % span == K - t:
        return SchemePoint("WCWL", label, K, Fraction(t, K), Fraction(K - t, 2 * h + 1), (2 * h + 1) * K)
    return SchemePoint("WCWL", label, K, Fraction(t, K), Fraction(K - t, 2 * h), 2 * h * K)


def wclc(k: int, t: int, z: int, m: int) -> SchemePoint:
    _require(1 <= t < k, "WCLC", "1 <= t < k")
    _require(1 <= z <= m, "WCLC", "1 <= z <= m")
    h = (k - 1) // (k - t)
    return SchemePoint(
        "WCLC",
        f"(k,t,z,m)=({k},{t},{z},{m})",
        comb(m, z) * k**z,
        1 - Fraction(k - t, k) ** z,
        Fraction(k - t, h) ** z,
        h**z * k ** (m - 1),
    )


def xxgl(K: int) -> SchemePoint:
    _require(K >= 2, "XXGL", "K >= 2")
    return SchemePoint("XXGL", f"K={K}", K, Fraction(K - 2, K), Fraction(K - 1, K), K)


def cwwc_spec(v: int, m: Sequence[int]) -> SchemePoint:
    """General NHSDP family: ``R = prod m``, gain ``2^n``, ``v >= prod (2 m_i + 1)``."""
    m = tuple(m)
    _require(v % 2 == 1, "CWWC", "v odd")
    _require(all(x >= 1 for x in m), "CWWC", "m_i >= 1")
    _require(v >= prod(2 * x + 1 for x in m), "CWWC", "v >= prod(2 m_i + 1)")
    z, g = prod(m), 2 ** len(m)
    m_text = ",".join(map(str, m))
    return SchemePoint("CWWC", f"(v,m)=({v},({m_text}))", v, 1 - Fraction(z * g, v), Fraction(z), v)


def cwwc(v: int, n: int) -> SchemePoint:
    """Uniform ``m_i = floor((q - 1) / 2)`` with ``q = v^(1/n)``; for ``v = q^n``
    this is the tabulated ``(q^n, 1 - 2^n floor((q-1)/2)^n / q^n, floor((q-1)/2)^n, q^n)``."""
    _require(v % 2 == 1, "CWWC", "q^n is odd")
    m = (floor_root(v, n) - 1) // 2
    _require(m >= 1, "CWWC", f"floor(({v}^(1/{n}) - 1) / 2) >= 1")
    point = cwwc_spec(v, (m,) * n)
    return SchemePoint("CWWC", f"(v,n)=({v},{n})", point.K, point.memory_ratio, point.load, point.subpacketization)


def zcw(m: int, w: int) -> SchemePoint:
    _require(1 <= w < m, "ZCW", "w < m")
    F = sum(comb(m, i) for i in range(w + 1))
    return SchemePoint(
        "ZCW",
        f"(m,w)=({m},{w})",
        2**m,
        1 - Fraction(comb(m, w), F),
        Fraction(comb(m, w) * 2 ** (m - w), F),
        F,
    )


def ast(r: int, k: int) -> SchemePoint:
    _require(r >= 1 and k >= 1, "AST", "r, k positive")
    K = 2**r * k
    return SchemePoint(
        "AST",
        f"(r,k)=({r},{k})",
        K,
        1 - Fraction(r + 1, 2**r) + Fraction(r, K),
        Fraction(k * (r + 1) - r, 2**r),
        K,
    )


def ytcc(H: int, a: int, b: int, r: int) -> SchemePoint:
    _require(r < a < H, "YTCC", "r < a < H")
    _require(r < b < H, "YTCC", "r < b < H")
    _require(a + b <= H + r, "YTCC", "a + b <= H + r")
    F = comb(H, b)
    load = Fraction(comb(H, a + b - 2 * r), F) * min(comb(H - a - b + 2 * r, a - r), comb(a + b - 2 * r, a - r))
    return SchemePoint(
        "YTCC",
        f"(H,a,b,r)=({H},{a},{b},{r})",
        comb(H, a),
        1 - Fraction(comb(a, r) * comb(H - a, b - r), F),
        load,
        F,
    )


def gaussian_binomial(k: int, t: int, q: int) -> int:
    """``[k, t]_q = prod_{i<t} (q^(k-i) - 1) / (q^(i+1) - 1)``."""
    if t < 0 or t > k:
        return 0
    num = prod(q ** (k - i) - 1 for i in range(t))
    den = prod(q ** (i + 1) - 1 for i in range(t))
    return num // den


def cksm1(q: int, k: int, m: int, t: int) -> SchemePoint:
    _require(q >= 2, "CKSM 1", "q prime power")
    _require(m + t <= k, "CKSM 1", "m + t <= k")
    line = lambda x: gaussian_binomial(x, 1, q)  # noqa: E731
    K = Fraction(q ** (t * (t - 1) // 2) * prod(line(k - i) for i in range(t)), factorial(t))
    kept = prod(Fraction(line(k - t - i), line(k - i)) for i in range(m))
    load = (
        Fraction(factorial(m) * q ** (m * t), factorial(m + t))
        * q ** (t * (t - 1) // 2)
        * prod(line(k - m - i) for i in range(t))
    )
    F = Fraction(q ** (m * (m - 1) // 2) * prod(line(k - i) for i in range(m)), factorial(m))
    return SchemePoint(
        "CKSM 1", f"(q,k,m,t)=({q},{k},{m},{t})", int(K), 1 - q ** (m * t) * kept, load, _int_if_whole(F)
    )


def cksm2(q: int, k: int, m: int, t: int) -> SchemePoint:
    _require(q >= 2, "CKSM 2", "2 <= q")
    _require(m + t <= k, "CKSM 2", "m + t <= k")
    F = gaussian_binomial(k, m + t, q)
    return SchemePoint(
        "CKSM 2",
        f"(q,k,m,t)=({q},{k},{m},{t})",
        gaussian_binomial(k, t, q),
        1 - Fraction(gaussian_binomial(k - t, m, q), F),
        Fraction(gaussian_binomial(k, m, q), F),
        F,
    )


CALCULATORS: dict[str, Callable[..., SchemePoint]] = {
    "ours": ours,
    "ours_conjugate": ours_conjugate,
    "mn": mn,
    "wcwl": wcwl,
    "wclc": wclc,
    "xxgl": xxgl,
    "cwwc": cwwc,
    "zcw": zcw,
    "ast": ast,
    "ytcc": ytcc,
    "cksm1": cksm1,
    "cksm2": cksm2,
}


def evaluate(name: str, *args: int) -> SchemePoint:
    try:
        calc = CALCULATORS[name.lower()]
    except KeyError:
        raise ParameterError(f"unknown scheme {name!r}; known: {', '.join(CALCULATORS)}") from None
    return calc(*args)


# --- rendering ------------------------------------------------------------

def decimal(x: Number, places: int = 4) -> str:
    """Round half-up to ``places`` decimals; integers print without a point."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    with localcontext() as ctx:
        ctx.prec = max(60, len(str(x.numerator)) + places + 5)
        value = Decimal(x.numerator) / Decimal(x.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def exact(x: Number) -> str:
    return str(Fraction(x))


TABLE_HEADER = ["K", "M/N", "Scheme", "Parameters", "Load", "Subpacketization", "M/N exact", "Load exact"]


def _row(p: SchemePoint) -> list[str]:
    return [
        str(p.K),
        decimal(p.memory_ratio),
        p.scheme,
        p.parameters,
        decimal(p.load),
        decimal(p.subpacketization),
        exact(p.memory_ratio),
        exact(p.load),
    ]


def _csv(header: list[str], rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def table(requests: Iterable[SchemePoint | tuple]) -> str:
    """CSV of the six table columns plus exact M/N and load.

    Each request is a ``SchemePoint`` or a ``(scheme, *args)`` tuple.
    """
    points = [r if isinstance(r, SchemePoint) else evaluate(r[0], *r[1:]) for r in requests]
    return _csv(TABLE_HEADER, (_row(p) for p in points))


# --- published comparison tables ------------------------------------------

# (scheme, args, printed K, printed M/N, printed load, printed subpacketization)
TABLE_II: list[tuple[str, tuple[int, ...], str, str, str, str]] = [
    ("zcw", (5, 2), "32", "0.6875", "1.25", "32"),
    ("ours", (33, 3), "33", "0.7576", "1", "264"),
    ("zcw", (7, 2), "128", "0.836", "2.625", "128"),
    ("ours", (129, 4), "129", "0.876", "1", "2064"),
    ("zcw", (8, 2), "256", "0.8906", "2.41", "256"),
    ("ours", (257, 5), "257", "0.8755", "1", "8224"),
    ("zcw", (9, 3), "512", "0.8359", "5.25", "512"),
    ("ours", (513, 4), "513", "0.8421", "5.0625", "8208"),
    ("zcw", (9, 2), "512", "0.9297", "2.04", "512"),
    ("ours", (513, 5), "513", "0.9376", "1", "16416"),
    ("ast", (2, 13), "52", "0.28846", "9.25", "52"),
    ("ours", (49, 2), "49", "0.26531", "9", "196"),
    ("ast", (2, 333), "1332", "0.2515", "249.25", "1332"),
    ("ours", (1331, 3), "1331", "0.2487", "125", "10648"),
    ("ast", (2, 548), "2192", "0.2509", "410.5", "2192"),
    ("ours", (2199, 3), "2199", "0.2142", "216", "17592"),
    ("ast", (3, 300), "2400", "0.50125", "149.625", "2400"),
    ("ours", (2401, 4), "2401", "0.460", "81", "38416"),
    ("cwwc", (341, 3), "341", "0.8123", "8", "341"),
    ("ours", (341, 4), "341", "0.7625", "5.0625", "5456"),
    ("cwwc", (713, 3), "713", "0.697", "27", "713"),
    ("ours", (713, 4), "713", "0.641", "16", "11408"),
    ("cwwc", (1111, 4), "1111", "0.7696", "16", "1111"),
    ("ours", (1111, 5), "1111", "0.7813", "7.5938", "35552"),
]

TABLE_III: list[tuple[str, tuple[int, ...], str, str, str, str]] = [
    ("ytcc", (22, 1, 8, 0), "22", "0.364", "1.556", "319770"),
    ("ours", (25, 2), "25", "0.36", "4", "100"),
    ("ytcc", (17, 2, 7, 1), "136", "0.485", "7", "19448"),
    ("cksm2", (2, 7, 6, 1), "127", "0.496", "9.143", "3.56E+09"),
    ("ours", (125, 3), "125", "0.488", "8", "1000"),
    ("ytcc", (26, 2, 5, 0), "325", "0.354", "10", "65780"),
    ("ours", (343, 3), "343", "0.370", "27", "2744"),
    ("ytcc", (22, 2, 12, 0), "231", "0.805", "0.4945055", "646646"),
    ("cksm2", (2, 8, 4, 1), "255", "0.8784", "2.0667", "97155"),
    ("ours", (243, 5), "243", "0.8683", "1", "7776"),
    ("cksm2", (2, 9, 5, 1), "511", "0.8767", "4.2", "788035"),
    ("ours", (511, 4), "511", "0.8415", "5.0625", "8176"),
    ("cksm1", (4, 4, 3, 1), "85", "0.247", "16", "95200"),
    ("ours", (85, 2), "85", "0.247", "16", "340"),
    ("cksm1", (5, 4, 3, 1), "156", "0.1987", "31.25", "604500"),
    ("ours", (151, 2), "151", "0.1987", "30.25", "604"),
    ("cksm1", (5, 4, 3, 1), "156", "0.1987", "31.25", "604500"),
    ("ours", (169, 2), "169", "0.1479", "36", "676"),
    ("cksm1", (2, 8, 5, 1), "255", "0.12157", "37.333", "8.10E+09"),
    ("ours", (225, 2), "225", "0.1289", "49", "900"),
    ("cksm1", (3, 6, 5, 1), "364", "0.332", "40.5", "4.51E+10"),
    ("ours", (343, 3), "343", "0.370", "27", "2744"),
]

TABLES = {"table2": TABLE_II, "table3": TABLE_III}

DECIMAL_TOLERANCE = 5e-4


def printed_matches(value: Number, printed: str, tol: float = DECIMAL_TOLERANCE) -> bool:
    """Integer cells must match exactly, plain decimals within ``tol``, and
    scientific cells within half a unit of their last mantissa digit."""
    value = Fraction(value)
    text = printed.strip()
    if "E" in text.upper():
        mantissa, exp = text.upper().split("E")
        places = len(mantissa.split(".")[1]) if "." in mantissa else 0
        half_unit = Fraction(5, 10 ** (places + 1)) * Fraction(10) ** int(exp)
        return abs(value - Fraction(text)) <= half_unit
    if "." not in text:
        return value == int(text)
    return abs(float(value - Fraction(text))) <= tol


@dataclass(frozen=True)
class ReproducedRow:
    point: SchemePoint
    printed: dict[str, str]

    @property
    def cell_matches(self) -> dict[str, bool]:
        p = self.point
        return {
            "K": printed_matches(p.K, self.printed["K"]),
            "M/N": printed_matches(p.memory_ratio, self.printed["M/N"]),
            "Load": printed_matches(p.load, self.printed["Load"]),
            "Subpacketization": printed_matches(p.subpacketization, self.printed["Subpacketization"]),
        }

    @property
    def matches(self) -> bool:
        return all(self.cell_matches.values())


def reproduce(name: str) -> list[ReproducedRow]:
    try:
        rows = TABLES[name]
    except KeyError:
        raise ParameterError(f"unknown table {name!r}; choose from {', '.join(TABLES)}") from None
    out = []
    for scheme, args, K, ratio, load, sub in rows:
        printed = {"K": K, "M/N": ratio, "Load": load, "Subpacketization": sub}
        out.append(ReproducedRow(evaluate(scheme, *args), printed))
    return out


def reproduction_csv(name: str) -> str:
    header = TABLE_HEADER + ["Printed M/N", "Printed Load", "Printed Subpacketization", "Mismatched cells"]
    rows = []
    for r in reproduce(name):
        bad = [cell for cell, ok in r.cell_matches.items() if not ok]
        rows.append(
            _row(r.point)
            + [r.printed["M/N"], r.printed["Load"], r.printed["Subpacketization"], ";".join(bad)]
        )
    return _csv(header, rows)


# --- tradeoff series --------------------------------------------------------

def ours_series(K: int) -> list[SchemePoint]:
    out, n = [], 1
    while 2**n <= K:
        try:
            out.append(ours(K, n))
        except ParameterError:
            break
        n += 1
    return out


def cwwc_series(K: int) -> list[SchemePoint]:
    out, n = [], 1
    while 3**n <= K:
        out.append(cwwc(K, n))
        n += 1
    return out


def wcwl_series(K: int) -> list[SchemePoint]:
    return [wcwl(K, t) for t in range(1, K)]


def mn_series(K: int) -> list[SchemePoint]:
    return [mn(K, t) for t in range(1, K)]


def wclc_series(K: int) -> list[SchemePoint]:
    """Every ``(k, t, z, m)`` with ``C(m, z) k^z = K``."""
    out = []
    for k in range(2, K + 1):
        z = 1
        while k**z <= K:
            if K % k**z == 0:
                target = K // k**z
                m = z
                while comb(m, z) <= target:
                    if comb(m, z) == target:
                        out.extend(wclc(k, t, z, m) for t in range(1, k))
                    m += 1
            z += 1
    return out


SERIES: dict[str, tuple[int, tuple[Callable[[int], list[SchemePoint]], ...]]] = {
    "k75": (75, (ours_series, cwwc_series, wcwl_series)),
    "k343": (343, (ours_series, cwwc_series, wcwl_series)),
    "k85": (85, (ours_series, mn_series, wclc_series)),
}


def series_csv(points: Iterable[SchemePoint], value: str) -> str:
    """Columns ``memory_ratio, value, scheme``; ``value`` is ``"load"`` or
    ``"subpacketization"``."""
    if value not in ("load", "subpacketization"):
        raise ParameterError(f"value must be 'load' or 'subpacketization', got {value!r}")
    pts = sorted(points, key=lambda p: (p.scheme, p.memory_ratio, p.parameters))
    return _csv(
        ["memory_ratio", "value", "scheme"],
        ([decimal(p.memory_ratio, 6), decimal(getattr(p, value), 6), p.scheme] for p in pts),
    )


def figure_series(name: str) -> dict[str, str]:
    """Both tradeoff CSVs for one user count, keyed by file stem."""
    try:
        K, builders = SERIES[name]
    except KeyError:
        raise ParameterError(f"unknown series {name!r}; choose from {', '.join(SERIES)}") from None
    points = [p for build in builders for p in build(K)]
    return {
        f"{name}_subpacketization": series_csv(points, "subpacketization"),
        f"{name}_load": series_csv(points, "load"),
    }
