"""Deterministic experiment reports.

One :class:`ReplicationRecord` per Monte Carlo replication, a fixed CSV column
set shared by every scenario, aggregates recomputable from the records, and a
list of pass/fail checks encoding each scenario's acceptance thresholds.

Byte determinism contract: identical report objects serialize to identical
bytes.  Floats are rendered by ``repr`` (shortest round-trip), JSON keys are
sorted, CSV rows end with a bare newline, and no timestamps or paths are
embedded.

CSV columns (one row per replication):

    rep                  replication index (0-based)
    flag                 scenario boolean outcome (1/0, empty when unused):
                         truth retained / truth covered / witness found /
                         posterior concentrated, per scenario docs
    data_free_act        label of the data-free choice ("" when unused)
    data_driven_act      label of the data-driven choice
    payoff_data_free     objective payoff of the data-free choice
    payoff_data_driven   objective payoff of the data-driven choice
    certainty_equivalent data-free max-min value of the problem
    metric               scenario numeric outcome (see scenario docs)
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

CSV_COLUMNS = (
    "rep",
    "flag",
    "data_free_act",
    "data_driven_act",
    "payoff_data_free",
    "payoff_data_driven",
    "certainty_equivalent",
    "metric",
)


@dataclass(frozen=True)
class ReplicationRecord:
    rep: int
    flag: bool | None = None
    data_free_act: str = ""
    data_driven_act: str = ""
    payoff_data_free: float | None = None
    payoff_data_driven: float | None = None
    certainty_equivalent: float | None = None
    metric: float | None = None

    def __post_init__(self) -> None:
        # numpy scalars (bool_, float64) are not JSON serializable and repr
        # differently; normalize once here so serialization stays plain
        object.__setattr__(self, "rep", int(self.rep))
        if self.flag is not None:
            object.__setattr__(self, "flag", bool(self.flag))
        for name in ("payoff_data_free", "payoff_data_driven",
                     "certainty_equivalent", "metric"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, float(v))

    def csv_row(self) -> list[str]:
        def cell(v) -> str:
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return repr(v)
            return str(v)
        return [cell(getattr(self, c)) for c in CSV_COLUMNS]

    def to_json(self) -> dict:
        return {
            "rep": self.rep,
            "flag": self.flag,
            "data_free_act": self.data_free_act,
            "data_driven_act": self.data_driven_act,
            "payoff_data_free": self.payoff_data_free,
            "payoff_data_driven": self.payoff_data_driven,
            "certainty_equivalent": self.certainty_equivalent,
            "metric": self.metric,
        }


@dataclass(frozen=True)
class CheckResult:
    """One acceptance assertion: what was required, what was observed."""

    name: str
    passed: bool
    observed: float | str
    required: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "passed", bool(self.passed))
        if not isinstance(self.observed, str):
            object.__setattr__(self, "observed", float(self.observed))

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "observed": self.observed, "required": self.required}


def _mean(values: list[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def aggregate(records: tuple[ReplicationRecord, ...] | list[ReplicationRecord]) -> dict:
    """Summary statistics derivable from the records alone."""
    flags = [r.flag for r in records if r.flag is not None]
    out: dict = {"reps": len(records)}
    if flags:
        freq = sum(1.0 for f in flags if f) / len(flags)
        out["flag_frequency"] = freq
        out["flag_se"] = (freq * (1.0 - freq) / len(flags)) ** 0.5
    else:
        out["flag_frequency"] = None
        out["flag_se"] = None
    out["payoff_data_free_mean"] = _mean(
        [r.payoff_data_free for r in records if r.payoff_data_free is not None])
    out["payoff_data_driven_mean"] = _mean(
        [r.payoff_data_driven for r in records if r.payoff_data_driven is not None])
    out["certainty_equivalent_mean"] = _mean(
        [r.certainty_equivalent for r in records if r.certainty_equivalent is not None])
    out["metric_mean"] = _mean([r.metric for r in records if r.metric is not None])
    return out


@dataclass(frozen=True)
class ExperimentReport:
    scenario: str
    config: dict
    records: tuple[ReplicationRecord, ...]
    aggregates: dict
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_text(self) -> str:
        doc = {
            "scenario": self.scenario,
            "config": self.config,
            "records": [r.to_json() for r in self.records],
            "aggregates": self.aggregates,
            "checks": [c.to_json() for c in self.checks],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.records:
            writer.writerow(r.csv_row())
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json_text()
        if fmt == "csv":
            return self.to_csv_text()
        raise ValueError(f"unknown report format {fmt!r}")

    def write(self, path: str, fmt: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.render(fmt))


def build_report(scenario: str, config: dict,
                 records: list[ReplicationRecord],
                 checks: list[CheckResult]) -> ExperimentReport:
    return ExperimentReport(scenario=scenario, config=config,
                            records=tuple(records),
                            aggregates=aggregate(records),
                            checks=tuple(checks))
