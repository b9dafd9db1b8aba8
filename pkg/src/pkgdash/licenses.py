"""License-compatibility findings from a static one-directional matrix.

The matrix answers "may a dependency under license D ship inside a
project distributed under license P" for ten SPDX identifiers. It is
loaded from a CSV data file and validated for totality at first use;
anything outside the matrix yields an ``unknown`` verdict, never a guess.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from pkgdash.alerts import AlertKind, SecurityAlert, Severity
from pkgdash.errors import ValidationError
from pkgdash.purl import PackageCoordinate

SUPPORTED_LICENSES = (
    "MIT", "BSD-2-Clause", "BSD-3-Clause", "Apache-2.0", "MPL-2.0",
    "LGPL-2.1-only", "GPL-2.0-only", "GPL-3.0-only", "ISC", "Unlicense",
)

PERMISSIVE_LICENSES = frozenset(
    {"MIT", "BSD-2-Clause", "BSD-3-Clause", "ISC", "Unlicense"})


class Verdict(str, Enum):
    COMPATIBLE = "compatible"
    INCOMPATIBLE = "incompatible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class LicenseFinding:
    project_license: str
    dep: PackageCoordinate
    dep_license: str
    verdict: Verdict
    rule: str

    def to_json(self) -> dict:
        return {
            "project_license": self.project_license,
            "dep": self.dep.purl,
            "dep_license": self.dep_license,
            "verdict": self.verdict.value,
            "rule": self.rule,
        }


_matrix: dict[tuple[str, str], tuple[Verdict, str]] | None = None


def load_matrix() -> dict[tuple[str, str], tuple[Verdict, str]]:
    """Load and validate the matrix: every ordered pair must be defined."""
    global _matrix
    if _matrix is not None:
        return _matrix
    table: dict[tuple[str, str], tuple[Verdict, str]] = {}
    data = resources.files("pkgdash").joinpath("data/license_matrix.csv").read_text()
    for row in csv.DictReader(data.splitlines()):
        try:
            verdict = Verdict(row["verdict"])
        except (KeyError, ValueError) as exc:
            raise ValidationError(f"bad matrix row {row!r}: {exc}") from None
        if verdict is Verdict.UNKNOWN:
            raise ValidationError(f"matrix rows may not be unknown: {row!r}")
        table[(row["project"], row["dep"])] = (verdict, row.get("rule", ""))
    for project in SUPPORTED_LICENSES:
        for dep in SUPPORTED_LICENSES:
            if (project, dep) not in table:
                raise ValidationError(f"matrix is missing the pair ({project}, {dep})")
    expected = len(SUPPORTED_LICENSES) ** 2
    if len(table) != expected:
        raise ValidationError(
            f"matrix must contain exactly {expected} pairs, found {len(table)}")
    _matrix = table
    return table


def judge(project_license: str | None, dep_license: str | None) -> tuple[Verdict, str]:
    """Single-pair verdict; unknown iff either side is outside the matrix."""
    matrix = load_matrix()
    p = (project_license or "").strip()
    d = (dep_license or "").strip()
    if p not in SUPPORTED_LICENSES or d not in SUPPORTED_LICENSES:
        return Verdict.UNKNOWN, "outside-supported-matrix"
    return matrix[(p, d)]


def check_license_compat(project_license: str, graph,
                         license_of: dict[PackageCoordinate, str]) -> list[LicenseFinding]:
    """One finding per non-root graph node with a known license."""
    findings = []
    for node in sorted(graph.nodes, key=lambda c: c.purl):
        if node == graph.root:
            continue
        dep_license = license_of.get(node)
        if dep_license is None:
            continue
        verdict, rule = judge(project_license, dep_license)
        findings.append(LicenseFinding(
            project_license=project_license,
            dep=node,
            dep_license=dep_license,
            verdict=verdict,
            rule=rule,
        ))
    return findings


def license_alerts(findings: list[LicenseFinding]) -> list[SecurityAlert]:
    """Incompatible findings escalate to high-severity alerts."""
    return [
        SecurityAlert(
            kind=AlertKind.LICENSE_CONFLICT,
            subject=f.dep,
            severity=Severity.HIGH,
            evidence=(f"{f.dep_license} dependency inside a {f.project_license} "
                      f"project ({f.rule})"),
        )
        for f in findings if f.verdict is Verdict.INCOMPATIBLE
    ]
