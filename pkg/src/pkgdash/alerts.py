"""Security alerts: the one finding shape every analysis stage emits."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from pkgdash.purl import PackageCoordinate, parse_purl


class AlertKind(str, Enum):
    VULNERABILITY = "vulnerability"
    LICENSE_CONFLICT = "license_conflict"
    REPO_ARCHIVED = "repo_archived"
    REPO_INACCESSIBLE = "repo_inaccessible"
    STALE_MAINTENANCE = "stale_maintenance"


class Severity(str, Enum):
    INFO = "info"
    WARN = "warn"
    HIGH = "high"


@dataclass(frozen=True)
class SecurityAlert:
    """A vulnerability, license-conflict, or community-status finding."""

    kind: AlertKind
    subject: PackageCoordinate | None
    severity: Severity
    evidence: str
    source_id: str | None = None

    def __post_init__(self):
        if self.kind is AlertKind.VULNERABILITY and not self.source_id:
            raise ValueError("vulnerability alerts must carry a source_id")

    def with_subject(self, subject: PackageCoordinate) -> "SecurityAlert":
        return SecurityAlert(self.kind, subject, self.severity, self.evidence, self.source_id)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "subject": self.subject.purl if self.subject else None,
            "severity": self.severity.value,
            "evidence": self.evidence,
            "source_id": self.source_id,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SecurityAlert":
        return cls(
            kind=AlertKind(doc["kind"]),
            subject=parse_purl(doc["subject"]) if doc.get("subject") else None,
            severity=Severity(doc["severity"]),
            evidence=doc.get("evidence", ""),
            source_id=doc.get("source_id"),
        )


def severity_from_string(raw: str | None) -> Severity:
    """Map an advisory severity string onto the alert scale.

    Numeric scores >= 7.0 and the labels critical/high map to high;
    everything else, including absent severity, maps to warn.
    """
    if raw is None:
        return Severity.WARN
    text = raw.strip()
    try:
        return Severity.HIGH if float(text) >= 7.0 else Severity.WARN
    except ValueError:
        pass
    return Severity.HIGH if text.lower() in ("critical", "high") else Severity.WARN
