"""rpm repodata primary-metadata parsing (XML subset).

The subset covers package/name/version plus the format block's license,
sourcerpm, provides, and requires entries. A one-package primary document
doubles as the rpm "manifest" for single-project analysis.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from pkgdash.errors import ParseError, SchemaError
from pkgdash.manifests import DependencyDecl, DependencyKind, ManifestDoc, RpmPackageMeta
from pkgdash.purl import coordinate
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem

_COMMON = "http://linux.duke.edu/metadata/common"
_RPMNS = "http://linux.duke.edu/metadata/rpm"

_FLAG_OPS = {"EQ": "=", "GE": ">=", "LE": "<=", "GT": ">", "LT": "<"}


def _tag(ns: str, name: str) -> str:
    return f"{{{ns}}}{name}"


def _evr_of(el: ET.Element) -> str | None:
    ver = el.get("ver")
    if not ver:
        return None
    epoch = el.get("epoch")
    rel = el.get("rel")
    out = ver
    if epoch and epoch != "0":
        out = f"{epoch}:{out}"
    if rel:
        out = f"{out}-{rel}"
    return out


def _entries(format_el: ET.Element | None, kind: str) -> list[tuple[str, str | None, str | None]]:
    if format_el is None:
        return []
    block = format_el.find(_tag(_RPMNS, kind))
    if block is None:
        return []
    out = []
    for entry in block.findall(_tag(_RPMNS, "entry")):
        name = entry.get("name")
        if not name:
            raise ParseError(f"rpm {kind} entry without a name")
        if name.startswith("("):
            raise ParseError(f"rich boolean dependencies are not supported: {name!r}")
        flags = entry.get("flags")
        evr = _evr_of(entry)
        op = _FLAG_OPS.get(flags) if flags else None
        if flags and op is None:
            raise ParseError(f"unknown rpm dependency flag {flags!r}")
        out.append((name, op, evr))
    return out


def parse_primary(content: bytes) -> list[RpmPackageMeta]:
    try:
        root = ET.fromstring(content)
    except ET.ParseError as exc:
        raise ParseError(f"invalid rpm primary XML: {exc}") from None
    if root.tag != _tag(_COMMON, "metadata"):
        raise ParseError(f"not a primary metadata document (root {root.tag!r})")
    packages: list[RpmPackageMeta] = []
    for pkg in root.findall(_tag(_COMMON, "package")):
        name_el = pkg.find(_tag(_COMMON, "name"))
        if name_el is None or not (name_el.text or "").strip():
            raise ParseError("rpm package entry is missing a name")
        name = name_el.text.strip()
        version_el = pkg.find(_tag(_COMMON, "version"))
        if version_el is None or not version_el.get("ver"):
            raise ParseError(f"rpm package {name!r} is missing a version")
        evr = _evr_of(version_el)
        summary_el = pkg.find(_tag(_COMMON, "summary"))
        url_el = pkg.find(_tag(_COMMON, "url"))
        checksum_el = pkg.find(_tag(_COMMON, "checksum"))
        format_el = pkg.find(_tag(_COMMON, "format"))
        license_el = format_el.find(_tag(_RPMNS, "license")) if format_el is not None else None

        provides = []
        for cap, op, cap_evr in _entries(format_el, "provides"):
            provides.append((cap, cap_evr))
        requires = []
        for cap, op, cap_evr in _entries(format_el, "requires"):
            if op and cap_evr:
                requires.append((cap, f"{op} {cap_evr}"))
            else:
                requires.append((cap, "*"))
        packages.append(RpmPackageMeta(
            name=name,
            evr=evr,
            summary=(summary_el.text or "").strip() or None if summary_el is not None else None,
            license=(license_el.text or "").strip() or None if license_el is not None else None,
            url=(url_el.text or "").strip() or None if url_el is not None else None,
            provides=tuple(provides),
            requires=tuple(requires),
            checksum=(checksum_el.text or "").strip() or None if checksum_el is not None else None,
        ))
    return packages


def parse_manifest(content: bytes) -> ManifestDoc:
    packages = parse_primary(content)
    if not packages:
        raise SchemaError("rpm primary document contains no packages")
    meta = packages[0]
    deps = [DependencyDecl(cap, parse_version_spec(Ecosystem.RPM, req), DependencyKind.RUNTIME)
            for cap, req in meta.requires]
    return ManifestDoc(
        coordinate=coordinate(Ecosystem.RPM, meta.name, meta.evr),
        description=meta.summary,
        declared_license=meta.license,
        declared_repo_url=meta.url,
        dependencies=deps,
    )
