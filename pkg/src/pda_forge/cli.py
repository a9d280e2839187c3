"""``pda-forge`` command line.

Exit codes: 0 success, 1 verification or decoding failure (report on stdout
as JSON), 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import compare, documents
from .delivery_sim import (
    DEFAULT_PACKET_BYTES,
    GENERATOR_ID,
    DemandVector,
    FileLibrary,
    all_demands,
    random_demands,
    simulate,
)
from .nhsdp import Nhsdp, nhsdp_to_nhslr
from .nhslr import AxbSpec, Nhslr, construct_axb, optimize_closed_form, optimize_exhaustive
from .pda import Pda, conjugate, mn_pda, pad_even_k, params, pda_from_nhslr, verify_pda
from .report import VerificationError
from .scheme import ParameterError

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _json(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load(path: str, kind: type) -> documents.Document:
    obj = documents.load(path)
    if not isinstance(obj, kind):
        raise UsageError(f"{path} holds a {type(obj).__name__}, expected {kind.__name__}")
    return obj


def _resolve_modulus(args: argparse.Namespace) -> int | None:
    if args.users is not None:
        if args.v is not None:
            raise UsageError("give either --v or --users, not both")
        return args.users if args.users % 2 else pad_even_k(args.users)
    if args.v in (None, "auto"):
        return None
    try:
        return int(args.v)
    except ValueError:
        raise UsageError(f"--v must be an odd integer or 'auto', got {args.v!r}") from None


def cmd_construct_nhslr(args: argparse.Namespace) -> int:
    v = _resolve_modulus(args)
    if args.m is not None:
        spec = AxbSpec(args.m, v)
    else:
        if v is None or args.n is None:
            raise UsageError("without --m, both --n and --v (or --users) are required")
        spec = optimize_exhaustive(v, args.n) if args.exhaustive else optimize_closed_form(v, args.n)
    _emit(documents.dumps(construct_axb(spec)), args.output)
    return OK


def cmd_convert(args: argparse.Namespace) -> int:
    _emit(documents.dumps(nhsdp_to_nhslr(_load(args.input, Nhsdp))), args.output)
    return OK


def cmd_build_pda(args: argparse.Namespace) -> int:
    _emit(documents.dumps(pda_from_nhslr(_load(args.input, Nhslr))), args.output)
    return OK


def cmd_conjugate(args: argparse.Namespace) -> int:
    _emit(documents.dumps(conjugate(_load(args.input, Pda))), args.output)
    return OK


def cmd_mn_pda(args: argparse.Namespace) -> int:
    _emit(documents.dumps(mn_pda(args.K, args.t)), args.output)
    return OK


def cmd_verify(args: argparse.Namespace) -> int:
    obj = documents.load(args.input)
    report = documents.verify(obj)
    out = report.to_dict()
    if report.ok and isinstance(obj, Pda):
        out["params"] = params(obj).to_dict()
    sys.stdout.write(_json(out))
    return OK if report.ok else FAILED


def cmd_optimize(args: argparse.Namespace) -> int:
    closed = optimize_closed_form(args.v, args.n)
    best = optimize_exhaustive(args.v, args.n) if args.exhaustive else closed
    m_text = ",".join(map(str, best.m))
    lines = [f"m=({m_text}), f={best.objective}"]
    if args.exhaustive:
        agrees = best.objective == closed.objective
        lines.append(f"matches closed form: {'true' if agrees else 'false'}")
    _emit("\n".join(lines), None)
    return OK


def _simulation_settings(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    base = Path(".")
    if args.config:
        path = Path(args.config)
        cfg = json.loads(path.read_text(encoding="utf-8"))
        base = path.parent
    pda_path = args.pda or cfg.get("pda")
    if pda_path is None:
        raise UsageError("simulate needs a PDA file (positional or config 'pda')")
    if args.pda is None:
        pda_path = str(base / pda_path)
    settings = {
        "pda": pda_path,
        "N": args.N if args.N is not None else cfg.get("N"),
        "packet_bytes": args.packet_bytes or cfg.get("packet_bytes", DEFAULT_PACKET_BYTES),
        "seed": args.seed if args.seed is not None else cfg.get("seed", 1),
        "demands": cfg.get("demands", {"sampled": {"count": 20, "seed": None}}),
    }
    if args.exhaustive:
        settings["demands"] = "exhaustive"
    elif args.demands is not None or args.demand_seed is not None:
        settings["demands"] = {"sampled": {"count": args.demands or 20, "seed": args.demand_seed}}
    return settings


def cmd_simulate(args: argparse.Namespace) -> int:
    s = _simulation_settings(args)
    p = _load(s["pda"], Pda)
    if not args.no_verify:
        report = verify_pda(p)
        if not report.ok:
            sys.stdout.write(_json(report.to_dict()))
            return FAILED
    k_real = args.real_users or p.K
    if not 1 <= k_real <= p.K:
        raise UsageError(f"--real-users must be in [1, {p.K}]")
    N = s["N"] if s["N"] is not None else k_real
    lib = FileLibrary(int(N), p.F, int(s["packet_bytes"]), int(s["seed"]))
    setting = s["demands"]
    if setting == "exhaustive":
        demands = list(all_demands(lib.N, k_real))
    elif isinstance(setting, dict) and "sampled" in setting:
        sampled = setting["sampled"]
        seed = sampled.get("seed")
        demands = random_demands(lib.N, k_real, int(sampled.get("count", 20)), int(lib.seed if seed is None else seed))
    elif isinstance(setting, list):
        demands = [DemandVector(d) for d in setting]
        for d in demands:
            d.validate(lib.N, k_real)
    else:
        raise UsageError(f"unrecognised demands setting {setting!r}")

    runs = simulate(p, lib, demands, k_real=k_real, verify=False, strict=not args.no_verify)
    ok = all(r.decode.all_ok for r in runs)
    out = {
        "generator": GENERATOR_ID,
        "K": p.K,
        "K_real": k_real,
        "F": p.F,
        "N": lib.N,
        "packet_bytes": lib.packet_bytes,
        "seed": lib.seed,
        "expected_load": str(Fraction(p.S, p.F)),
        "worst_measured_load": str(max((r.transcript.measured_load for r in runs), default=0)),
        "all_decoded": ok,
        "runs": [r.summary(args.dump_payloads) for r in runs],
    }
    sys.stdout.write(_json(out))
    return OK if ok else FAILED


def _parse_request(text: str) -> tuple:
    name, _, rest = text.partition(":")
    if not rest:
        raise UsageError(f"scheme request must look like NAME:a,b,..., got {text!r}")
    return (name, *_ints(rest))


def cmd_compare(args: argparse.Namespace) -> int:
    if args.reproduce:
        _emit(compare.reproduction_csv(args.reproduce), args.output)
        return OK
    if args.series:
        files = compare.figure_series(args.series)
        out_dir = Path(args.out_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)
        for stem, text in files.items():
            (out_dir / f"{stem}.csv").write_text(text, encoding="utf-8")
            print(out_dir / f"{stem}.csv")
        return OK
    _emit(compare.table([_parse_request(r) for r in args.requests]), args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pda-forge",
        description="Build, verify and simulate placement delivery arrays for coded caching.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct-nhslr", help="AXB construction of a non-half-sum Latin rectangle")
    c.add_argument("--m", type=_ints, help="comma-separated m_1,...,m_n")
    c.add_argument("--v", help="odd modulus, or 'auto' for the smallest admissible one")
    c.add_argument("--n", type=int, help="dimension n when choosing m automatically")
    c.add_argument("--users", type=int, help="user count; even counts get one virtual user")
    c.add_argument("--exhaustive", action="store_true", help="choose m by enumeration rather than closed form")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_construct_nhslr)

    c = sub.add_parser("convert", help="NHSDP document to NHSLR document")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_convert)

    c = sub.add_parser("build-pda", help="NHSLR document to PDA document")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_build_pda)

    c = sub.add_parser("conjugate", help="conjugate PDA (rows and symbols swap roles)")
    c.add_argument("input")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_conjugate)

    c = sub.add_parser("mn-pda", help="MN placement delivery array")
    c.add_argument("--K", type=int, required=True)
    c.add_argument("--t", type=int, required=True)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_mn_pda)

    c = sub.add_parser("verify", help="verify any NHSLR, NHSDP or PDA document")
    c.add_argument("input")
    c.set_defaults(func=cmd_verify)

    c = sub.add_parser("optimize", help="best uniform or exhaustive m for given v, n")
    c.add_argument("--v", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--exhaustive", action="store_true")
    c.set_defaults(func=cmd_optimize)

    c = sub.add_parser("simulate", help="run placement, delivery and decoding for a PDA")
    c.add_argument("pda", nargs="?")
    c.add_argument("--config", help="simulation config JSON")
    c.add_argument("--N", type=int, help="number of files (default: number of real users)")
    c.add_argument("--packet-bytes", type=int)
    c.add_argument("--seed", type=int, help="packet generator seed (default 1)")
    c.add_argument("--demands", type=int, help="number of random demand vectors (default 20)")
    c.add_argument("--demand-seed", type=int, help="seed for demand sampling (default: --seed)")
    c.add_argument("--exhaustive", action="store_true", help="every demand vector in [N]^K")
    c.add_argument("--real-users", type=int, help="leading columns that are real users")
    c.add_argument("--dump-payloads", action="store_true", help="include hex payloads of every message")
    c.add_argument("--no-verify", action="store_true", help="skip the PDA check and report bad decodes")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="scheme parameter tables and tradeoff series")
    c.add_argument("requests", nargs="*", help="NAME:a,b,... e.g. ours:33,3 mn:4,2")
    c.add_argument("--reproduce", choices=sorted(compare.TABLES))
    c.add_argument("--series", choices=sorted(compare.SERIES))
    c.add_argument("--out-dir", help="directory for --series CSV files")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        report = exc.report.to_dict() if exc.report is not None else {"error": str(exc)}
        sys.stdout.write(_json(report))
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except (UsageError, ParameterError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
