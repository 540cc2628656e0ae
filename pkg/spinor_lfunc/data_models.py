"""
Report and configuration data models.
Reports serialize every rational as a "p/q" string and carry a schema version.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .rational import format_rational

REPORT_SCHEMA_VERSION = 1

PASS = "pass"
FAIL = "fail"
ERROR = "error"


@dataclass
class CoefficientCheck:
    """Comparison of one coefficient (or one trace) of the two sides."""
    index: int
    lhs: Fraction
    rhs: Fraction
    stratum: List[str] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self) -> Dict[str, Any]:
        result = {
            'index': self.index,
            'lhs': format_rational(self.lhs),
            'rhs': format_rational(self.rhs),
            'equal': self.equal
        }
        if not self.equal and self.stratum:
            result['stratum'] = self.stratum
        return result


@dataclass
class VerificationReport:
    """
    Per-coefficient record of one identity check.

    The verdict is derived: pass iff every coefficient agrees.
    """
    check: str
    case: Dict[str, Any]
    parameters: Dict[str, Any]
    order: int
    exponent: Optional[str]
    coefficients: List[CoefficientCheck] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return PASS if all(c.equal for c in self.coefficients) else FAIL

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def mismatches(self) -> List[CoefficientCheck]:
        return [c for c in self.coefficients if not c.equal]

    def first_mismatch(self) -> Optional[CoefficientCheck]:
        mismatches = self.mismatches()
        return mismatches[0] if mismatches else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema': REPORT_SCHEMA_VERSION,
            'check': self.check,
            'case': self.case,
            'parameters': self.parameters,
            'order': self.order,
            'normalization_exponent': self.exponent,
            'coefficients': [c.to_dict() for c in self.coefficients],
            'notes': self.notes,
            'extras': self.extras,
            'verdict': self.verdict
        }


@dataclass
class SweepEntry:
    """Outcome of one sweep instance: a report, or the error that stopped it."""
    key: str
    report: Optional[VerificationReport] = None
    error: Optional[str] = None

    @property
    def verdict(self) -> str:
        if self.report is None:
            return ERROR
        return self.report.verdict

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {'key': self.key, 'verdict': self.verdict}
        if self.report is not None:
            result['report'] = self.report.to_dict()
        if self.error is not None:
            result['error'] = self.error
        return result


@dataclass
class SweepReport:
    """Aggregate of a sweep, ordered by instance key."""
    grid: str
    order: int
    entries: List[SweepEntry] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def sort(self) -> None:
        self.entries.sort(key=lambda e: e.key)

    @property
    def counts(self) -> Dict[str, int]:
        counts = {PASS: 0, FAIL: 0, ERROR: 0}
        for entry in self.entries:
            counts[entry.verdict] += 1
        return counts

    @property
    def verdict(self) -> str:
        counts = self.counts
        if counts[ERROR]:
            return ERROR
        return FAIL if counts[FAIL] else PASS

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema': REPORT_SCHEMA_VERSION,
            'check': 'sweep',
            'grid': self.grid,
            'order': self.order,
            'counts': self.counts,
            'summary': self.summary,
            'entries': [e.to_dict() for e in self.entries],
            'verdict': self.verdict
        }


@dataclass
class RunConfig:
    """A validated command-line or file run configuration."""
    subcommand: str
    case: Optional[str] = None
    n: Optional[int] = None
    m: Optional[int] = None
    order: int = 8
    source: str = "random"
    seed: Optional[int] = None
    count: int = 1
    parameters: Dict[str, Any] = field(default_factory=dict)
    output: Optional[str] = None
    output_format: str = "json"
    jobs: int = 1
    grid: Optional[str] = None

    def validate(self) -> 'ValidationResult':
        result = ValidationResult(is_valid=True)
        if self.source == "random" and self.seed is None:
            result.add_error("seed is required when parameters are drawn at random")
        if self.source == "explicit" and not self.parameters:
            result.add_error("explicit source needs parameter values")
        if self.order < 0:
            result.add_error("truncation order must be non-negative")
        if self.count < 1:
            result.add_error("count must be at least 1")
        if self.jobs < 1:
            result.add_error("jobs must be at least 1")
        if self.output_format not in ("json", "text"):
            result.add_error(f"unknown output format {self.output_format}")
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subcommand': self.subcommand,
            'case': self.case,
            'n': self.n,
            'm': self.m,
            'order': self.order,
            'source': self.source,
            'seed': self.seed,
            'count': self.count,
            'parameters': self.parameters,
            'output': self.output,
            'format': self.output_format,
            'jobs': self.jobs,
            'grid': self.grid
        }


@dataclass
class ValidationResult:
    """Result of data validation operation."""
    is_valid: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def add_error(self, message: str) -> None:
        """Add an error message."""
        self.errors.append(message)
        self.is_valid = False

    def add_warning(self, message: str) -> None:
        """Add a warning message."""
        self.warnings.append(message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary representation."""
        return {
            'is_valid': self.is_valid,
            'errors': self.errors,
            'warnings': self.warnings
        }
