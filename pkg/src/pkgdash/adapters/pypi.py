"""pypi project manifest (TOML subset) and pinned requirements-style lock."""

from __future__ import annotations

import re

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from pkgdash.errors import ParseError, SchemaError, SpecSyntax, VersionSyntax
from pkgdash.manifests import DependencyDecl, DependencyKind, LockDoc, LockPin, ManifestDoc
from pkgdash.purl import coordinate
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem

_REQ_RE = re.compile(r"^\s*(?P<name>[A-Za-z0-9._-]+)\s*(?:\[[^\]]*\])?\s*(?P<spec>[^;]*)")
_PIN_RE = re.compile(
    r"^(?P<name>[A-Za-z0-9._-]+)==(?P<version>\S+?)"
    r"(?:\s+--hash=(?P<algo>[a-z0-9]+):(?P<digest>[0-9a-fA-F]+))?\s*$")
_HEADER_RE = re.compile(r"^#\s*project:\s*(?P<name>[A-Za-z0-9._-]+)==(?P<version>\S+)\s*$")


def _parse_requirement(raw: str, kind: DependencyKind) -> DependencyDecl:
    # Environment markers (after ";") are opaque and treated as always-true.
    m = _REQ_RE.match(raw)
    if not m or not m.group("name"):
        raise ParseError(f"unparseable pypi requirement: {raw!r}")
    spec_text = m.group("spec").strip() or "*"
    try:
        spec = parse_version_spec(Ecosystem.PYPI, spec_text)
    except SpecSyntax as exc:
        raise ParseError(str(exc)) from None
    return DependencyDecl(m.group("name"), spec, kind)


def parse_manifest(content: bytes) -> ManifestDoc:
    try:
        doc = tomllib.loads(content.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid pypi manifest TOML: {exc}") from None
    project = doc.get("project")
    if not isinstance(project, dict):
        raise SchemaError("pypi manifest has no [project] table")
    name = project.get("name")
    if not name or not isinstance(name, str):
        raise SchemaError("pypi manifest is missing a name")
    version = project.get("version")
    try:
        coord = coordinate(Ecosystem.PYPI, name, version if isinstance(version, str) else None)
    except (VersionSyntax, ValueError) as exc:
        raise SchemaError(f"bad pypi manifest identity: {exc}") from None
    license_field = project.get("license")
    if isinstance(license_field, dict):
        license_field = license_field.get("text")
    urls = project.get("urls") if isinstance(project.get("urls"), dict) else {}
    repo = None
    for key in ("Repository", "repository", "Source", "source", "Homepage", "homepage"):
        if isinstance(urls.get(key), str):
            repo = urls[key]
            break
    deps: list[DependencyDecl] = []
    for raw in project.get("dependencies", []) or []:
        if isinstance(raw, str):
            deps.append(_parse_requirement(raw, DependencyKind.RUNTIME))
    optional = project.get("optional-dependencies")
    if isinstance(optional, dict):
        for group, entries in optional.items():
            kind = DependencyKind.DEV if group in ("dev", "test") else DependencyKind.OPTIONAL
            for raw in entries or []:
                if isinstance(raw, str):
                    deps.append(_parse_requirement(raw, kind))
    return ManifestDoc(
        coordinate=coord,
        description=project.get("description") if isinstance(project.get("description"), str) else None,
        declared_license=license_field if isinstance(license_field, str) else None,
        declared_repo_url=repo,
        dependencies=deps,
    )


def parse_lockfile(content: bytes) -> LockDoc:
    """Line-oriented pins, one ``name==version`` per line.

    The first line must be a ``# project: name==version`` header naming
    the root. Optional ``--hash=algo:hex`` suffixes become pin digests.
    """
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"pypi lock is not UTF-8: {exc}") from None
    root = None
    pins: list[LockPin] = []
    seen: set[tuple[str, str]] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        header = _HEADER_RE.match(stripped)
        if header:
            root = coordinate(Ecosystem.PYPI, header.group("name"), header.group("version"))
            continue
        if stripped.startswith("#"):
            continue
        m = _PIN_RE.match(stripped)
        if not m:
            raise ParseError(f"unparseable lock line {lineno}: {stripped!r}")
        try:
            coord = coordinate(Ecosystem.PYPI, m.group("name"), m.group("version"))
        except VersionSyntax as exc:
            raise ParseError(f"bad pin on line {lineno}: {exc}") from None
        key = (coord.name, coord.version.text)
        if key in seen:
            continue
        seen.add(key)
        spec = parse_version_spec(Ecosystem.PYPI, f"=={m.group('version')}")
        pins.append(LockPin(coordinate=coord, resolved_from_spec=spec,
                            artifact_digest=m.group("digest")))
    if root is None:
        raise SchemaError("pypi lock is missing the '# project: name==version' header")
    return LockDoc(root=root, pins=pins)
