from pydantic import BaseModel, Field
from typing import List, Literal

CheckLevel = Literal["error", "warning"]


class CheckResult(BaseModel):
    name: str
    passed: bool
    message: str = ""
    level: CheckLevel = "error"


class ValidationReport(BaseModel):
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Warnings never fail a report."""
        return all(c.passed for c in self.checks if c.level == "error")

    def add(self, name: str, passed: bool, message: str = "", level: CheckLevel = "error") -> None:
        self.checks.append(CheckResult(name=name, passed=passed, message=message, level=level))

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)
