"""Pass/fail bookkeeping shared by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)

    def check(self, name: str, passed, detail: str = "") -> bool:
        passed = bool(passed)
        self.checks.append(Check(name, passed, detail))
        return passed

    def extend(self, other: "Report", prefix: str | None = None) -> None:
        pre = f"{other.title if prefix is None else prefix}."
        for c in other.checks:
            self.checks.append(Check(pre + c.name, c.passed, c.detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            line = f"{self.title}.{c.name}={'pass' if c.passed else 'FAIL'}"
            if c.detail:
                line += f" ({c.detail})"
            out.append(line)
        return out

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }
