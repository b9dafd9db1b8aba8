"""npm package.json and package-lock.json (v2/v3) parsing."""

from __future__ import annotations

import json

from pkgdash.errors import ParseError, SchemaError, SpecSyntax, UnsupportedLockVersion, VersionSyntax
from pkgdash.manifests import DependencyDecl, DependencyKind, LockDoc, LockPin, ManifestDoc
from pkgdash.purl import coordinate
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem

_DEP_TABLES = (
    ("dependencies", DependencyKind.RUNTIME),
    ("devDependencies", DependencyKind.DEV),
    ("optionalDependencies", DependencyKind.OPTIONAL),
)


def _load_json(content: bytes) -> dict:
    try:
        doc = json.loads(content.decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ParseError(f"invalid npm JSON document: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("npm document is not a JSON object")
    return doc


def _spec(raw: str):
    # An empty requirement string means "any version".
    return parse_version_spec(Ecosystem.NPM, raw.strip() or "*")


def parse_manifest(content: bytes) -> ManifestDoc:
    doc = _load_json(content)
    name = doc.get("name")
    if not name or not isinstance(name, str):
        raise SchemaError("npm manifest is missing a name")
    version = doc.get("version")
    try:
        coord = coordinate(Ecosystem.NPM, name, version if isinstance(version, str) else None)
    except (VersionSyntax, ValueError) as exc:
        raise SchemaError(f"bad npm manifest identity: {exc}") from None
    repo = doc.get("repository")
    if isinstance(repo, dict):
        repo = repo.get("url")
    license_field = doc.get("license")
    if isinstance(license_field, dict):
        license_field = license_field.get("type")
    deps: list[DependencyDecl] = []
    for table, kind in _DEP_TABLES:
        entries = doc.get(table)
        if not isinstance(entries, dict):
            continue
        for dep_name, raw in entries.items():
            if not isinstance(raw, str):
                raise ParseError(f"npm dependency {dep_name!r} has a non-string requirement")
            try:
                deps.append(DependencyDecl(dep_name, _spec(raw), kind))
            except SpecSyntax as exc:
                raise ParseError(str(exc)) from None
    return ManifestDoc(
        coordinate=coord,
        description=doc.get("description") if isinstance(doc.get("description"), str) else None,
        declared_license=license_field if isinstance(license_field, str) else None,
        declared_repo_url=repo if isinstance(repo, str) else None,
        dependencies=deps,
    )


def parse_lockfile(content: bytes) -> LockDoc:
    doc = _load_json(content)
    lock_version = doc.get("lockfileVersion")
    if lock_version not in (2, 3):
        raise UnsupportedLockVersion(
            f"npm lockfileVersion {lock_version!r} is outside the supported set (2, 3)")
    packages = doc.get("packages")
    if not isinstance(packages, dict):
        raise SchemaError("npm lock has no packages table")
    root_entry = packages.get("", {})
    root_name = root_entry.get("name") or doc.get("name")
    if not root_name:
        raise SchemaError("npm lock is missing the root package name")
    root_version = root_entry.get("version") or doc.get("version")
    root = coordinate(Ecosystem.NPM, root_name, root_version)

    # Install paths identify instances; the nesting prefix names the parent.
    entries: dict[str, dict] = {}
    for path, entry in packages.items():
        if path == "" or not isinstance(entry, dict):
            continue
        if "node_modules/" not in path:
            continue  # workspace links are out of scope
        entries[path] = entry

    def name_of(path: str) -> str:
        tail = path.rsplit("node_modules/", 1)[1]
        return tail

    root_deps = root_entry.get("dependencies") or {}
    pins: list[LockPin] = []
    seen: set[tuple[str, str]] = set()
    for path in sorted(entries):
        entry = entries[path]
        version = entry.get("version")
        if not version:
            raise SchemaError(f"npm lock entry {path!r} has no version")
        name = name_of(path)
        pin_coord = coordinate(Ecosystem.NPM, name, version)
        key = (pin_coord.full_name, version)
        if key in seen:
            continue
        seen.add(key)
        parent_path = path.rsplit("/node_modules/", 1)[0]
        if parent_path == path or parent_path not in entries:
            parent = root
        else:
            parent_entry = entries[parent_path]
            parent = coordinate(Ecosystem.NPM, name_of(parent_path),
                                parent_entry.get("version"))
        spec = None
        if parent == root and isinstance(root_deps.get(name), str):
            spec = _spec(root_deps[name])
        integrity = entry.get("integrity")
        pins.append(LockPin(
            coordinate=pin_coord,
            resolved_from_spec=spec,
            parent=parent,
            artifact_digest=integrity if isinstance(integrity, str) else None,
        ))
    return LockDoc(root=root, pins=pins)
