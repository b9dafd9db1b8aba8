"""Cargo.toml manifest and Cargo.lock (v3) parsing."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from pkgdash.errors import ParseError, SchemaError, SpecSyntax, UnsupportedLockVersion, VersionSyntax
from pkgdash.manifests import DependencyDecl, DependencyKind, LockDoc, LockPin, ManifestDoc
from pkgdash.purl import coordinate
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem


def _load_toml(content: bytes, what: str) -> dict:
    try:
        return tomllib.loads(content.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid {what} TOML: {exc}") from None


def _dep_decl(name: str, value, default_kind: DependencyKind) -> DependencyDecl:
    kind = default_kind
    if isinstance(value, str):
        raw = value
    elif isinstance(value, dict):
        raw = value.get("version", "*")
        if value.get("optional"):
            kind = DependencyKind.OPTIONAL
        if isinstance(value.get("package"), str):
            name = value["package"]  # renamed dependency; registry name wins
    else:
        raise ParseError(f"cargo dependency {name!r} has an unsupported shape")
    try:
        spec = parse_version_spec(Ecosystem.CARGO, str(raw))
    except SpecSyntax as exc:
        raise ParseError(str(exc)) from None
    return DependencyDecl(name, spec, kind)


def parse_manifest(content: bytes) -> ManifestDoc:
    doc = _load_toml(content, "cargo manifest")
    package = doc.get("package")
    if not isinstance(package, dict):
        raise SchemaError("cargo manifest has no [package] table")
    name = package.get("name")
    if not name or not isinstance(name, str):
        raise SchemaError("cargo manifest is missing a name")
    version = package.get("version")
    try:
        coord = coordinate(Ecosystem.CARGO, name, version if isinstance(version, str) else None)
    except (VersionSyntax, ValueError) as exc:
        raise SchemaError(f"bad cargo manifest identity: {exc}") from None
    deps: list[DependencyDecl] = []
    for table, kind in (("dependencies", DependencyKind.RUNTIME),
                        ("dev-dependencies", DependencyKind.DEV)):
        entries = doc.get(table)
        if not isinstance(entries, dict):
            continue
        for dep_name, value in entries.items():
            deps.append(_dep_decl(dep_name, value, kind))
    return ManifestDoc(
        coordinate=coord,
        description=package.get("description") if isinstance(package.get("description"), str) else None,
        declared_license=package.get("license") if isinstance(package.get("license"), str) else None,
        declared_repo_url=package.get("repository") if isinstance(package.get("repository"), str) else None,
        dependencies=deps,
    )


def parse_lockfile(content: bytes) -> LockDoc:
    doc = _load_toml(content, "cargo lock")
    if doc.get("version") != 3:
        raise UnsupportedLockVersion(
            f"cargo lock version {doc.get('version')!r} is outside the supported set (3)")
    packages = doc.get("package")
    if not isinstance(packages, list):
        raise SchemaError("cargo lock has no package entries")
    roots = [p for p in packages if isinstance(p, dict) and "source" not in p]
    if len(roots) != 1:
        raise SchemaError(
            f"expected exactly one workspace package in the lock, found {len(roots)}")
    root_entry = roots[0]
    try:
        root = coordinate(Ecosystem.CARGO, root_entry["name"], root_entry.get("version"))
    except (KeyError, VersionSyntax) as exc:
        raise SchemaError(f"bad cargo lock root: {exc}") from None

    def dep_refs(entry: dict) -> list[tuple[str, str | None]]:
        out = []
        for ref in entry.get("dependencies", []) or []:
            if not isinstance(ref, str):
                continue
            name, _, ver = ref.partition(" ")
            out.append((name, ver or None))
        return out

    by_name: dict[str, dict] = {}
    for entry in packages:
        if entry is root_entry or not isinstance(entry, dict):
            continue
        name = entry.get("name")
        version = entry.get("version")
        if not name or not version:
            raise SchemaError("cargo lock entry missing name or version")
        by_name.setdefault(f"{name} {version}", entry)

    # Single parent per pin: the root when it references the package,
    # otherwise the lexicographically first referencing package.
    root_refs = {n for n, _ in dep_refs(root_entry)}
    referencing: dict[str, list[str]] = {}
    for key, entry in by_name.items():
        for dep_name, dep_ver in dep_refs(entry):
            referencing.setdefault(dep_name, []).append(key)

    pins: list[LockPin] = []
    for key in sorted(by_name):
        entry = by_name[key]
        name, version = entry["name"], entry["version"]
        coord = coordinate(Ecosystem.CARGO, name, version)
        if name in root_refs:
            parent = root
        else:
            holders = sorted(referencing.get(name, []))
            if holders:
                holder = by_name[holders[0]]
                parent = coordinate(Ecosystem.CARGO, holder["name"], holder["version"])
            else:
                parent = None
        checksum = entry.get("checksum")
        pins.append(LockPin(
            coordinate=coord,
            parent=parent,
            artifact_digest=checksum if isinstance(checksum, str) else None,
        ))
    return LockDoc(root=root, pins=pins)
