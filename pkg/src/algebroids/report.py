"""Verification reports: one record per checked identity."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class CheckRecord:
    """Outcome of a single identity check."""

    name: str
    identity: str          # the mathematical identity being tested
    passed: bool
    residual: Optional[str] = None   # rendered residual polynomial, if any
    detail: Optional[str] = None

    def to_dict(self, residuals: bool = False) -> dict:
        out = {"name": self.name, "identity": self.identity,
               "passed": self.passed}
        if self.detail is not None:
            out["detail"] = self.detail
        if residuals and self.residual is not None:
            out["residual"] = self.residual
        return out


@dataclass
class Report:
    """A deterministic, ordered collection of check records."""

    title: str
    records: List[CheckRecord] = field(default_factory=list)
    elapsed_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def add(self, name: str, identity: str, residual_poly=None, passed=None,
            detail: Optional[str] = None) -> CheckRecord:
        if passed is None:
            passed = residual_poly is None or residual_poly.is_zero()
        rendered = None
        if residual_poly is not None and not residual_poly.is_zero():
            rendered = repr(residual_poly)
        rec = CheckRecord(name, identity, passed, rendered, detail)
        self.records.append(rec)
        return rec

    def extend(self, other: "Report", prefix: str = "") -> None:
        for r in other.records:
            self.records.append(CheckRecord(prefix + r.name, r.identity,
                                            r.passed, r.residual, r.detail))

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self, residuals: bool = False) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [r.to_dict(residuals) for r in self.records],
        }

    def render(self, residuals: bool = False, timings: bool = False) -> str:
        lines = [f"== {self.title} =="]
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            line = f"  [{status}] {r.name}: {r.identity}"
            if r.detail:
                line += f" [{r.detail}]"
            lines.append(line)
            if residuals and r.residual:
                lines.append(f"         residual: {r.residual}")
        verdict = "OK" if self.passed else "FAILED"
        tail = f"-- {self.title}: {verdict}"
        if timings and self.elapsed_ms is not None:
            tail += f" ({self.elapsed_ms:.1f} ms)"
        lines.append(tail)
        return "\n".join(lines)
