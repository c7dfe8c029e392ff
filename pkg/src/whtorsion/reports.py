"""Report values and their deterministic text/JSON rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List

SCHEMA = 1


@dataclass
class Report:
    verdict: str
    data: Dict[str, Any] = field(default_factory=dict)
    citations: List[str] = field(default_factory=list)
    caveats: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "verdict": self.verdict, "data": self.data,
                "citations": list(self.citations), "caveats": list(self.caveats)}

    @classmethod
    def from_json(cls, obj) -> "Report":
        if obj.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {obj.get('schema')!r}")
        return cls(obj["verdict"], obj.get("data", {}), list(obj.get("citations", [])),
                   list(obj.get("caveats", [])))


def emit(report: Report, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"verdict: {report.verdict}"]
    for key in sorted(report.data):
        lines.append(f"  {key}: {json.dumps(report.data[key], sort_keys=True)}")
    if report.citations:
        lines.append("citations:")
        lines.extend(f"  - {c}" for c in report.citations)
    if report.caveats:
        lines.append("caveats:")
        lines.extend(f"  - {c}" for c in report.caveats)
    return ("\n".join(lines) + "\n").encode()
