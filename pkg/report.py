#!/usr/bin/env python3
"""Check records and the JSON report the workbench writes."""

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

import sympy as sp
from pydantic import BaseModel, Field, model_validator

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
TOOL_VERSION = "1.0.0"


class CheckRecord(BaseModel):
    name: str
    scheme: str
    inputs: Dict[str, Any] = Field(default_factory=dict)
    value: Any = None
    exact: Optional[str] = None
    expected: Any = None
    tolerance: Optional[float] = None
    passed: bool
    note: Optional[str] = None


class Summary(BaseModel):
    total: int = 0
    passed: int = 0
    failed: int = 0


class Report(BaseModel):
    schema_version: str = SCHEMA_VERSION
    tool_version: str = TOOL_VERSION
    generated_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    command: str = ""
    config: Dict[str, Any] = Field(default_factory=dict)
    sections: Dict[str, List[CheckRecord]] = Field(default_factory=dict)
    summary: Summary = Field(default_factory=Summary)

    @model_validator(mode="after")
    def _summary_matches(self):
        records = [r for section in self.sections.values() for r in section]
        passed = sum(r.passed for r in records)
        if self.summary.total and (self.summary.total != len(records) or self.summary.passed != passed):
            raise ValueError("summary does not match the check records")
        return self

    def add_section(self, name: str, records: List[CheckRecord]):
        self.sections[name] = list(records)
        self.refresh_summary()

    def refresh_summary(self):
        records = [r for section in self.sections.values() for r in section]
        passed = sum(r.passed for r in records)
        self.summary = Summary(total=len(records), passed=passed, failed=len(records) - passed)

    @property
    def all_passed(self) -> bool:
        return self.summary.failed == 0

    def failures(self) -> List[CheckRecord]:
        return [r for section in self.sections.values() for r in section if not r.passed]

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n")
        logger.info(f"Wrote report to {path} ({self.summary.passed}/{self.summary.total} checks passed)")
        return path


def load_report(path: Path) -> Report:
    return Report.model_validate_json(Path(path).read_text())


def exact_text(value: Any) -> str:
    """Exact value as text: rationals as "p/q", anything else via sympy"""
    return str(sp.sympify(value))


def numeric(value: Any) -> Any:
    """JSON-friendly decimal rendering: float, or {re, im} for complex values"""
    z = complex(value)
    if z.imag == 0:
        return z.real
    return {"re": z.real, "im": z.imag}


def exact_check(name: str, scheme: str, value: Any, expected: Any, inputs: Optional[Dict[str, Any]] = None,
                note: Optional[str] = None) -> CheckRecord:
    """Record comparing two exact sympy values"""
    passed = sp.simplify(sp.sympify(value) - sp.sympify(expected)) == 0
    return CheckRecord(name=name, scheme=scheme, inputs=inputs or {}, value=numeric(value),
                       exact=exact_text(value), expected=exact_text(expected), passed=bool(passed), note=note)


def tolerance_check(name: str, scheme: str, value: Any, tolerance: float, expected: Any = 0.0,
                    inputs: Optional[Dict[str, Any]] = None, note: Optional[str] = None) -> CheckRecord:
    """Record passing iff |value - expected| <= tolerance"""
    deviation = abs(complex(value) - complex(expected))
    return CheckRecord(name=name, scheme=scheme, inputs=inputs or {}, value=numeric(value),
                       expected=numeric(expected), tolerance=tolerance, passed=bool(deviation <= tolerance), note=note)
