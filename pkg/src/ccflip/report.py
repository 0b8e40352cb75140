"""JSON run reports."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

SCHEMA_VERSION = 1


def render_cost(doubled: int) -> str:
    """Decimal rendering of a doubled-integer cost, e.g. 1351 -> '675.5'."""
    q, r = divmod(doubled, 2)
    return f"{q}.5" if r else str(q)


@dataclass
class RunReport:
    algorithm: str
    instance: str
    seed: int
    cost_doubled: int
    num_clusters: int
    runtime_ms: float
    params: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def cost(self) -> Fraction:
        return Fraction(self.cost_doubled, 2)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cost"] = render_cost(self.cost_doubled)
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        d = dict(d)
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        rendered = d.pop("cost", None)
        rep = cls(**d)
        if rendered is not None and rendered != render_cost(rep.cost_doubled):
            raise ValueError("cost fields disagree")
        return rep

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def format_table(reports) -> str:
    """Aligned text table, sorted by algorithm name."""
    rows = [("algorithm", "cost", "clusters", "ms")]
    for r in sorted(reports, key=lambda r: (r.algorithm, r.seed)):
        rows.append((r.algorithm, render_cost(r.cost_doubled), str(r.num_clusters), f"{r.runtime_ms:.1f}"))
    widths = [max(len(row[i]) for row in rows) for i in range(4)]
    return "\n".join("  ".join(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                               for i, cell in enumerate(row)) for row in rows)
