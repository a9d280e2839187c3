"""Run the caching scheme a PDA defines, byte for byte.

Placement: user ``k`` stores packet ``j`` of every file iff cell ``(j, k)`` is
a star. Delivery: for each symbol ``s`` the server sends the XOR of
``W[d_k, j]`` over all cells ``(j, k)`` holding ``s``. Decoding: a user XORs
the message with its cached copies of the other packets in it.

Packets are handled as Python ints of ``packet_bytes`` bytes; equality of
ints of fixed width is byte equality. File indices in demand vectors are
1-based, matching ``d in [N]^K``.
"""

from __future__ import annotations

import hashlib
import itertools
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .pda import STAR, Pda, verify_pda
from .scheme import ParameterError

GENERATOR_ID = "sha256-ctr-v1"
DEFAULT_PACKET_BYTES = 64
DEFAULT_EXHAUSTIVE_BUDGET = 10**6


class StructuralError(RuntimeError):
    """A decoder needed a packet or message that the scheme should have supplied."""


def worker_count() -> int:
    raw = os.environ.get("PDA_FORGE_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def packet_bytes_for(seed: int, n: int, j: int, size: int) -> bytes:
    """SHA-256 in counter mode over ``"pda-forge|seed|n|j|ctr"`` (0-based n, j),
    concatenated and truncated to ``size`` bytes."""
    out = bytearray()
    ctr = 0
    while len(out) < size:
        out += hashlib.sha256(f"pda-forge|{seed}|{n}|{j}|{ctr}".encode()).digest()
        ctr += 1
    return bytes(out[:size])


@dataclass(frozen=True)
class FileLibrary:
    N: int
    F: int
    packet_bytes: int = DEFAULT_PACKET_BYTES
    seed: int = 1

    def __post_init__(self) -> None:
        if self.N < 1 or self.F < 1 or self.packet_bytes < 1:
            raise ParameterError("N, F and packet_bytes must all be positive")

    @cached_property
    def packets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(
                int.from_bytes(packet_bytes_for(self.seed, n, j, self.packet_bytes), "big")
                for j in range(self.F)
            )
            for n in range(self.N)
        )

    def packet(self, n: int, j: int) -> bytes:
        """Packet ``j`` of file ``n`` (both 0-based)."""
        return self.packets[n][j].to_bytes(self.packet_bytes, "big")


@dataclass(frozen=True)
class DemandVector:
    d: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))

    def validate(self, N: int, K: int) -> None:
        if len(self.d) != K:
            raise ParameterError(f"demand has {len(self.d)} entries for {K} users")
        bad = [x for x in self.d if not 1 <= x <= N]
        if bad:
            raise ParameterError(f"demanded files {bad} are outside [1, {N}]")

    def padded(self, K: int) -> DemandVector:
        """Extend to ``K`` users; virtual users ask for file 1."""
        return DemandVector(self.d + (1,) * (K - len(self.d)))


@dataclass
class CacheContents:
    """Per-user maps ``(file, packet) -> payload``, 0-based keys."""

    users: list[dict[tuple[int, int], int]]

    def get(self, k: int, n: int, j: int) -> int:
        try:
            return self.users[k][(n, j)]
        except KeyError:
            raise StructuralError(f"user {k} has no cached copy of packet {j} of file {n}") from None

    def size(self, k: int) -> int:
        return len(self.users[k])


@dataclass
class DeliveryTranscript:
    demand: DemandVector
    F: int
    messages: list[tuple[int, int]]
    packet_bytes: int

    @property
    def measured_load(self) -> Fraction:
        return Fraction(len(self.messages), self.F)

    def message(self, s: int) -> int:
        sym, payload = self.messages[s - 1]
        if sym != s:
            raise StructuralError(f"transcript slot {s} carries symbol {sym}")
        return payload

    def payload_hex(self) -> list[str]:
        return [p.to_bytes(self.packet_bytes, "big").hex() for _, p in self.messages]


@dataclass
class DecodeReport:
    recovered: list[bool]
    missing: list[int] = field(default_factory=list)
    decoded: list[dict[int, int]] = field(default_factory=list, repr=False)

    @property
    def all_ok(self) -> bool:
        return all(self.recovered)

    @property
    def failed_users(self) -> list[int]:
        return [k for k, ok in enumerate(self.recovered) if not ok]


def _cells_by_symbol(p: Pda) -> list[list[tuple[int, int]]]:
    groups: list[list[tuple[int, int]]] = [[] for _ in range(p.S)]
    for j, k in zip(*np.nonzero(p.cells)):
        s = int(p.cells[j, k])
        if 1 <= s <= p.S:
            groups[s - 1].append((int(j), int(k)))
    return groups


def place(p: Pda, lib: FileLibrary) -> CacheContents:
    if lib.F != p.F:
        raise ParameterError(f"library has F={lib.F} packets per file, PDA has F={p.F}")
    users = []
    for k in range(p.K):
        rows = np.flatnonzero(p.cells[:, k] == STAR)
        users.append({(n, int(j)): lib.packets[n][j] for n in range(lib.N) for j in rows})
    return CacheContents(users)


def deliver(p: Pda, lib: FileLibrary, d: DemandVector) -> DeliveryTranscript:
    d.validate(lib.N, p.K)
    messages = []
    for s, cells in enumerate(_cells_by_symbol(p), start=1):
        payload = 0
        for j, k in cells:
            payload ^= lib.packets[d.d[k] - 1][j]
        messages.append((s, payload))
    return DeliveryTranscript(d, p.F, messages, lib.packet_bytes)


def decode(
    p: Pda,
    caches: CacheContents,
    transcript: DeliveryTranscript,
    d: DemandVector,
    lib: FileLibrary,
    *,
    users: Iterable[int] | None = None,
    strict: bool = True,
) -> DecodeReport:
    """Reconstruct each user's demanded file from its cache plus the transcript.

    ``lib`` is consulted only to judge the result. With ``strict=False`` a
    packet missing from a user's cache is skipped instead of raising, which
    is how a broken array shows up as a wrong reconstruction.
    """
    groups = _cells_by_symbol(p)
    check = range(p.K) if users is None else list(users)
    recovered, missing, decoded = [], [], []
    for k in check:
        want = d.d[k] - 1
        got: dict[int, int] = {}
        gaps = 0
        for j in range(p.F):
            s = int(p.cells[j, k])
            if s == STAR:
                if (want, j) in caches.users[k]:
                    got[j] = caches.users[k][(want, j)]
                elif strict:
                    caches.get(k, want, j)
                else:
                    gaps += 1
                continue
            if not 1 <= s <= len(transcript.messages):
                if strict:
                    raise StructuralError(f"no message for symbol {s}")
                gaps += 1
                continue
            value = transcript.message(s)
            for j2, k2 in groups[s - 1]:
                if (j2, k2) == (j, k):
                    continue
                key = (d.d[k2] - 1, j2)
                if key in caches.users[k]:
                    value ^= caches.users[k][key]
                elif strict:
                    caches.get(k, *key)
                else:
                    gaps += 1
            got[j] = value
        ok = len(got) == p.F and all(got[j] == lib.packets[want][j] for j in range(p.F))
        recovered.append(ok)
        missing.append(gaps)
        decoded.append(got)
    return DecodeReport(recovered, missing, decoded)


def reencode(p: Pda, report: DecodeReport, d: DemandVector, lib: FileLibrary) -> list[int]:
    """Rebuild every message from decoded packets (own demand) and the
    library (packets a user never needed to decode)."""
    groups = _cells_by_symbol(p)
    out = []
    for cells in groups:
        payload = 0
        for j, k in cells:
            payload ^= report.decoded[k].get(j, lib.packets[d.d[k] - 1][j])
        out.append(payload)
    return out


@dataclass
class RunResult:
    demand: DemandVector
    transcript: DeliveryTranscript
    decode: DecodeReport

    def summary(self, dump_payloads: bool = False) -> dict:
        out = {
            "demand": list(self.demand.d),
            "messages": len(self.transcript.messages),
            "load": str(self.transcript.measured_load),
            "all_decoded": self.decode.all_ok,
            "failed_users": self.decode.failed_users,
        }
        if dump_payloads:
            out["payloads"] = self.transcript.payload_hex()
        return out


def run_once(
    p: Pda,
    lib: FileLibrary,
    d: DemandVector,
    *,
    caches: CacheContents | None = None,
    k_real: int | None = None,
    strict: bool = True,
) -> RunResult:
    k_real = p.K if k_real is None else k_real
    full = d.padded(p.K)
    caches = place(p, lib) if caches is None else caches
    transcript = deliver(p, lib, full)
    report = decode(p, caches, transcript, full, lib, users=range(k_real), strict=strict)
    return RunResult(full, transcript, report)


def random_demands(N: int, K: int, count: int, seed: int) -> list[DemandVector]:
    """``count`` demand vectors from Python's Mersenne Twister seeded with ``seed``."""
    rng = random.Random(seed)
    return [DemandVector(tuple(rng.randint(1, N) for _ in range(K))) for _ in range(count)]


def all_demands(N: int, K: int, budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> Iterable[DemandVector]:
    if N**K > budget:
        raise ParameterError(
            f"{N}^{K} = {N**K} demand vectors exceeds the budget {budget}; use sampled mode"
        )
    return (DemandVector(t) for t in itertools.product(range(1, N + 1), repeat=K))


def simulate(
    p: Pda,
    lib: FileLibrary,
    demands: Sequence[DemandVector],
    *,
    k_real: int | None = None,
    verify: bool = True,
    strict: bool = True,
) -> list[RunResult]:
    """Place once, then deliver and decode each demand. Fails closed on an
    unverified array unless ``verify=False``."""
    if verify:
        verify_pda(p).require("PDA")
    caches = place(p, lib)
    demands = list(demands)

    def one(d: DemandVector) -> RunResult:
        return run_once(p, lib, d, caches=caches, k_real=k_real, strict=strict)

    workers = min(worker_count(), max(1, len(demands)))
    if workers == 1:
        return [one(d) for d in demands]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, demands))


def worst_case_load(
    p: Pda,
    lib: FileLibrary,
    mode: str = "exhaustive",
    *,
    count: int = 100,
    seed: int = 1,
    k_real: int | None = None,
    budget: int = DEFAULT_EXHAUSTIVE_BUDGET,
) -> Fraction:
    """Maximum measured load over all (or ``count`` sampled) demand vectors.

    The array policy sends every symbol whatever the demand, so the result
    must equal S/F; anything else raises.
    """
    k_real = p.K if k_real is None else k_real
    if mode == "exhaustive":
        demands: Iterable[DemandVector] = all_demands(lib.N, k_real, budget)
    elif mode == "sampled":
        demands = random_demands(lib.N, k_real, count, seed)
    else:
        raise ParameterError(f"unknown mode {mode!r}")
    worst = Fraction(0)
    for d in demands:
        load = deliver(p, lib, d.padded(p.K)).measured_load
        worst = max(worst, load)
    expected = Fraction(p.S, p.F)
    if worst != expected:
        raise StructuralError(f"measured worst-case load {worst} differs from S/F = {expected}")
    return worst
