"""Vulnerability advisories: file-based ingestion and version matching.

Advisory documents are a strict subset of the public OSV JSON schema:
``id``, ``summary``, ``severity[].score``, ``affected[].package``
(ecosystem/name/purl), ``affected[].ranges[].events[]``, and
``affected[].versions[]``. A live fetcher can drop documents into the
same directory; matching stays purely local.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from pkgdash.alerts import AlertKind, SecurityAlert, severity_from_string
from pkgdash.errors import VersionSyntax
from pkgdash.purl import PackageCoordinate, normalize_name
from pkgdash.versions import Ecosystem, Version, parse_version

logger = logging.getLogger(__name__)

# OSV ecosystem labels seen in the wild, mapped onto ours.
_ECOSYSTEM_ALIASES = {
    "npm": Ecosystem.NPM,
    "pypi": Ecosystem.PYPI,
    "crates.io": Ecosystem.CARGO,
    "cargo": Ecosystem.CARGO,
    "rpm": Ecosystem.RPM,
}


@dataclass(frozen=True)
class VulnRange:
    type: str  # SEMVER or ECOSYSTEM
    events: tuple[dict, ...]  # ordered {introduced|fixed|last_affected: str}


@dataclass(frozen=True)
class AffectedPackage:
    ecosystem: Ecosystem
    name: str  # canonical
    ranges: tuple[VulnRange, ...] = ()
    explicit_versions: tuple[str, ...] = ()


@dataclass(frozen=True)
class VulnRecord:
    id: str
    summary: str = ""
    severity: str | None = None
    affected: tuple[AffectedPackage, ...] = ()


@dataclass
class AdvisoryLoad:
    records: list[VulnRecord] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _parse_affected(entry: dict, diagnostics: list[str], advisory_id: str):
    package = entry.get("package") or {}
    eco_raw = str(package.get("ecosystem", "")).strip()
    eco = _ECOSYSTEM_ALIASES.get(eco_raw) or _ECOSYSTEM_ALIASES.get(eco_raw.lower())
    name = package.get("name")
    if eco is None or not name:
        diagnostics.append(
            f"{advisory_id}: skipped affected entry with ecosystem={eco_raw!r} name={name!r}")
        return None
    try:
        canonical = normalize_name(eco, name)
    except Exception as exc:
        diagnostics.append(f"{advisory_id}: bad package name {name!r}: {exc}")
        return None
    ranges = []
    for r in entry.get("ranges", []) or []:
        rtype = r.get("type", "ECOSYSTEM")
        if rtype not in ("SEMVER", "ECOSYSTEM"):
            diagnostics.append(f"{advisory_id}: skipped range of type {rtype!r}")
            continue
        events = tuple(e for e in r.get("events", []) if isinstance(e, dict))
        if not events or "introduced" not in events[0]:
            diagnostics.append(
                f"{advisory_id}: range events must start with an introduced event")
            continue
        ranges.append(VulnRange(type=rtype, events=events))
    versions = tuple(str(v) for v in entry.get("versions", []) or [])
    return AffectedPackage(ecosystem=eco, name=canonical,
                           ranges=tuple(ranges), explicit_versions=versions)


def parse_advisory(doc: dict, diagnostics: list[str]) -> VulnRecord | None:
    advisory_id = doc.get("id")
    if not advisory_id:
        diagnostics.append("skipped advisory without an id")
        return None
    severity = None
    for s in doc.get("severity", []) or []:
        if isinstance(s, dict) and s.get("score") is not None:
            severity = str(s["score"])
            break
    affected = []
    for entry in doc.get("affected", []) or []:
        parsed = _parse_affected(entry, diagnostics, advisory_id)
        if parsed is not None:
            affected.append(parsed)
    return VulnRecord(
        id=str(advisory_id),
        summary=str(doc.get("summary", "")),
        severity=severity,
        affected=tuple(affected),
    )


def load_advisories(directory: Path) -> AdvisoryLoad:
    """Read every ``*.json`` advisory in a directory; bad files become diagnostics."""
    out = AdvisoryLoad()
    directory = Path(directory)
    if not directory.is_dir():
        return out
    for path in sorted(directory.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            out.diagnostics.append(f"{path.name}: unreadable advisory: {exc}")
            continue
        record = parse_advisory(doc, out.diagnostics)
        if record is not None:
            out.records.append(record)
    return out


def _version_in_range(v: Version, rng: VulnRange, eco: Ecosystem,
                      diagnostics: list[str], advisory_id: str) -> bool:
    # Events pair up as [introduced, fixed) spans; a last_affected event
    # closes its span inclusively; a trailing introduced stays open.
    def parse(text: str) -> Version | None:
        try:
            return parse_version(eco, text)
        except VersionSyntax:
            diagnostics.append(f"{advisory_id}: unparseable event version {text!r}")
            return None

    lower: Version | None = None  # None inside an open span means "from 0"
    open_span = False
    for event in rng.events:
        if "introduced" in event:
            if open_span and (lower is None or v >= lower):
                return True  # previous span never terminated
            raw = str(event["introduced"])
            if raw == "0":
                lower = None
            else:
                lower = parse(raw)
                if lower is None:
                    return False
            open_span = True
        elif "fixed" in event and open_span:
            fixed = parse(str(event["fixed"]))
            if fixed is None:
                return False
            if (lower is None or v >= lower) and v < fixed:
                return True
            open_span = False
        elif "last_affected" in event and open_span:
            last = parse(str(event["last_affected"]))
            if last is None:
                return False
            if (lower is None or v >= lower) and v <= last:
                return True
            open_span = False
    if open_span:
        return lower is None or v >= lower
    return False


def match_vulnerabilities(c: PackageCoordinate,
                          records: list[VulnRecord],
                          diagnostics: list[str] | None = None) -> list[SecurityAlert]:
    """One alert per advisory whose affected set covers the coordinate.

    A version is affected when it is listed explicitly, or covered by a
    range read as [introduced, fixed) with last_affected closing a span
    inclusively. Malformed records are skipped with diagnostics.
    """
    if c.version is None:
        raise ValueError("match_vulnerabilities needs a versioned coordinate")
    diags = diagnostics if diagnostics is not None else []
    alerts: list[SecurityAlert] = []
    for record in records:
        hit = False
        for affected in record.affected:
            if affected.ecosystem != c.ecosystem or affected.name != c.full_name:
                continue
            for raw in affected.explicit_versions:
                try:
                    if parse_version(c.ecosystem, raw) == c.version:
                        hit = True
                        break
                except VersionSyntax:
                    diags.append(f"{record.id}: unparseable explicit version {raw!r}")
            if hit:
                break
            for rng in affected.ranges:
                if _version_in_range(c.version, rng, c.ecosystem, diags, record.id):
                    hit = True
                    break
            if hit:
                break
        if hit:
            summary = record.summary or record.id
            sev_note = f" (severity {record.severity})" if record.severity else ""
            alerts.append(SecurityAlert(
                kind=AlertKind.VULNERABILITY,
                subject=c,
                severity=severity_from_string(record.severity),
                evidence=f"{summary}{sev_note}",
                source_id=record.id,
            ))
    return alerts


def cross_validate(records: list[VulnRecord], snapshots: dict[Ecosystem, object]) -> list[str]:
    """Flag advisories naming packages absent from the registry snapshot.

    Nothing is dropped; the diagnostics exist so gaps are visible.
    """
    diagnostics = []
    for record in records:
        for affected in record.affected:
            snap = snapshots.get(affected.ecosystem)
            if snap is None or not snap.has(affected.name):
                diagnostics.append(
                    f"{record.id}: {affected.ecosystem.value}/{affected.name} "
                    "is not present in the registry snapshot")
    return diagnostics
