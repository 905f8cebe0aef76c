"""Experiment plans and verification reports.

Reports are plain JSON documents. Every nondeterministic field (wall time,
timestamp) lives under the single ``timing`` key so two runs with the same
config and seed produce byte-identical files once that key is dropped.
"""

from __future__ import annotations

import datetime as _dt
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

SCHEMA_VERSION = 1
TIMING_KEY = "timing"


@dataclass
class ExperimentPlan:
    """Seeded, capped description of every sampled or enumerated domain."""

    rank: int = 2
    seed: int = 0
    exhaustive_entry_radius: int = 4
    exhaustive_total_budget: int = 7
    deep_budget: int = 6
    pair_radius: int = 5
    sample_counts: dict[str, int] = field(default_factory=dict)
    max_len: int = 50
    max_len_ladder: tuple[int, ...] = (25, 50, 100, 200)
    ladder_samples: int = 300
    enumeration_cap: int | None = None
    jobs: int = 1

    DEFAULT_SAMPLES = {
        "cocycle": 10_000,
        "primitive": 10_000,
        "mu_simplification": 2_000,
        "delta_p": 10_000,
        "three_sum": 10_000,
        "mu_cocycle": 1_000,
        "norms": 2_000,
    }

    def __post_init__(self):
        if self.rank < 1:
            raise ConfigError("rank must be >= 1")
        ladder = tuple(self.max_len_ladder)
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("max_len_ladder must be strictly increasing")
        self.max_len_ladder = ladder
        for stage, count in self.sample_counts.items():
            if count < 0:
                raise ConfigError(f"negative sample count for stage {stage!r}")

    def samples(self, stage: str) -> int:
        if stage in self.sample_counts:
            return self.sample_counts[stage]
        return self.DEFAULT_SAMPLES.get(stage, 1_000)

    def budget(self, arity: int) -> int:
        return self.exhaustive_total_budget if arity <= 5 else self.deep_budget

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "seed": self.seed,
            "exhaustive_entry_radius": self.exhaustive_entry_radius,
            "exhaustive_total_budget": self.exhaustive_total_budget,
            "deep_budget": self.deep_budget,
            "pair_radius": self.pair_radius,
            "sample_counts": dict(sorted(self.sample_counts.items())),
            "max_len": self.max_len,
            "max_len_ladder": list(self.max_len_ladder),
            "ladder_samples": self.ladder_samples,
            "enumeration_cap": self.enumeration_cap,
            "jobs": self.jobs,
        }


@dataclass
class StageResult:
    """One verification stage: a named check with an optional counterexample."""

    name: str
    passed: bool
    checked: int = 0
    counterexample: dict | None = None
    stats: dict | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "checked_count": self.checked,
            "counterexample": self.counterexample,
            "stats": self.stats,
        }


@dataclass
class Report:
    """Aggregated outcome of one workbench command."""

    command: str
    stages: list[StageResult] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)
    wall_time_s: float = 0.0
    started_at: str = ""

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    def add(self, stage: StageResult) -> StageResult:
        self.stages.append(stage)
        return stage

    def to_json(self) -> dict:
        from . import __version__

        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "overall_status": "pass" if self.passed else "fail",
            "versions": {"massey-workbench": __version__, "report-schema": SCHEMA_VERSION},
            "stages": [s.to_json() for s in self.stages],
            "config": self.config_echo,
            "notes": self.notes,
            TIMING_KEY: {
                "started_at": self.started_at,
                "wall_time_s": self.wall_time_s,
            },
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(render_json(self.to_json()), encoding="utf-8")


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def load_report(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def strip_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != TIMING_KEY}


def render_table(doc: dict) -> str:
    """Human-readable table for a stored report."""
    rows = [("stage", "status", "checked", "details")]
    for stage in doc.get("stages", []):
        details = ""
        if stage.get("counterexample"):
            details = f"counterexample: {json.dumps(stage['counterexample'], sort_keys=True)}"
        elif stage.get("stats"):
            stats = stage["stats"]
            keys = sorted(stats)[:4]
            details = ", ".join(f"{k}={stats[k]}" for k in keys)
        rows.append(
            (
                stage.get("name", "?"),
                stage.get("status", "?"),
                str(stage.get("checked_count", "")),
                details,
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = []
    for i, row in enumerate(rows):
        lines.append(
            "  ".join(col.ljust(widths[j]) for j, col in enumerate(row[:3])) + "  " + row[3]
        )
        if i == 0:
            lines.append("-" * (sum(widths) + 40))
    header = (
        f"command: {doc.get('command', '?')}    overall: {doc.get('overall_status', '?')}"
    )
    return header + "\n" + "\n".join(lines)
