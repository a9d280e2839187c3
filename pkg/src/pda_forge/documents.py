"""JSON documents for NHSLRs, NHSDPs and PDAs.

Key order is fixed: NHSLR ``v, g, b, rows``; NHSDP ``v, g, blocks``; PDA
``K, F, Z, S, rows`` and optionally ``pair_labels``. Each array row sits on
its own line so diffs stay readable, and every document ends with a newline.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .nhsdp import Nhsdp, verify_nhsdp
from .nhslr import Nhslr, verify_nhslr
from .pda import Pda, verify_pda
from .report import VerificationReport

Document = Nhslr | Nhsdp | Pda

_GRIDS = ("rows", "blocks", "pair_labels")


def dumps(obj: Document | dict) -> str:
    doc = obj if isinstance(obj, dict) else obj.to_dict()
    parts = []
    for key, value in doc.items():
        if key in _GRIDS and isinstance(value, list):
            inner = ",\n".join("    " + json.dumps(row, separators=(", ", ": ")) for row in value)
            text = "[\n" + inner + "\n  ]" if value else "[]"
        else:
            text = json.dumps(value)
        parts.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


def detect(doc: dict) -> str:
    """``"pda"``, ``"nhsdp"`` or ``"nhslr"`` from the keys present."""
    if not isinstance(doc, dict):
        raise ValueError("document must be a JSON object")
    if "K" in doc and "rows" in doc:
        return "pda"
    if "blocks" in doc:
        return "nhsdp"
    if "v" in doc and "rows" in doc:
        return "nhslr"
    raise ValueError(f"cannot tell document type from keys {sorted(doc)}")


def parse(doc: dict) -> Document:
    kind = detect(doc)
    if kind == "pda":
        return Pda.from_dict(doc)
    if kind == "nhsdp":
        return Nhsdp.from_dict(doc)
    return Nhslr.from_dict(doc)


def loads(text: str) -> Document:
    return parse(json.loads(text))


def load(path: str | Path) -> Document:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(obj: Document, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def verify(obj: Any) -> VerificationReport:
    if isinstance(obj, Pda):
        return verify_pda(obj)
    if isinstance(obj, Nhsdp):
        return verify_nhsdp(obj)
    if isinstance(obj, Nhslr):
        return verify_nhslr(obj)
    raise TypeError(f"nothing to verify for {type(obj).__name__}")
