"""Immutable registry snapshots: the offline stand-in for native registries.

On disk a snapshot root holds one directory per ecosystem with one JSON
document per canonical package name, plus a top-level ``index.json``
carrying the content digest:

    snapshot/
      index.json                  {"digest": ..., "ecosystems": {"npm": [...]}}
      npm/lodash.json             {"name": "lodash", "versions": [...]}
      pypi/requests-like.json     ...

Names with characters unsafe in filenames (npm scopes) are percent-encoded.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote, unquote

from pkgdash.errors import ParseError, SchemaError
from pkgdash.manifests import DependencyDecl, DependencyKind
from pkgdash.purl import normalize_name
from pkgdash.version_specs import VersionSpec, parse_version_spec
from pkgdash.versions import Ecosystem, Version, parse_version


@dataclass(frozen=True)
class SnapshotEntry:
    """One published version of one package."""

    version: Version
    dependencies: tuple[DependencyDecl, ...] = ()
    declared_license: str | None = None
    declared_repo_url: str | None = None
    artifact_digest: str | None = None
    description: str | None = None
    provides: tuple[tuple[str, str | None], ...] = ()  # rpm capabilities


@dataclass
class RegistrySnapshot:
    """All known versions of all packages for one ecosystem; immutable."""

    ecosystem: Ecosystem
    digest: str = ""
    _packages: dict[str, list[SnapshotEntry]] = field(default_factory=dict)
    _provides: dict[str, list[tuple[str, SnapshotEntry, str | None]]] = field(default_factory=dict)

    @classmethod
    def from_packages(cls, ecosystem: Ecosystem | str,
                      packages: dict[str, list[SnapshotEntry]],
                      digest: str = "") -> "RegistrySnapshot":
        eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
        snap = cls(ecosystem=eco, digest=digest)
        for name, entries in packages.items():
            canonical = normalize_name(eco, name)
            ordered = sorted(entries, key=lambda e: e.version, reverse=True)
            versions_seen = set()
            for e in ordered:
                if e.version in versions_seen:
                    raise SchemaError(f"duplicate version {e.version} for {canonical}")
                versions_seen.add(e.version)
            snap._packages[canonical] = ordered
        if eco is Ecosystem.RPM:
            snap._build_provides()
        if not digest:
            snap.digest = snap._content_digest()
        return snap

    def _build_provides(self) -> None:
        for name, entries in self._packages.items():
            for entry in entries:
                caps = dict(entry.provides)
                # every package implicitly provides its own name at its EVR
                caps.setdefault(name, entry.version.text)
                for cap, evr in caps.items():
                    self._provides.setdefault(cap, []).append((name, entry, evr))

    def _content_digest(self) -> str:
        h = hashlib.sha256()
        for name in sorted(self._packages):
            for entry in self._packages[name]:
                h.update(name.encode())
                h.update(entry.version.text.encode())
                for dep in entry.dependencies:
                    h.update(f"{dep.name}|{dep.spec.text}|{dep.kind.value}".encode())
                h.update((entry.declared_license or "").encode())
        return h.hexdigest()

    def names(self) -> list[str]:
        return sorted(self._packages)

    def has(self, raw_name: str) -> bool:
        try:
            return normalize_name(self.ecosystem, raw_name) in self._packages
        except Exception:
            return False

    def entries(self, raw_name: str) -> list[SnapshotEntry]:
        """Versions of a package, newest first; empty when unknown."""
        try:
            canonical = normalize_name(self.ecosystem, raw_name)
        except Exception:
            return []
        return list(self._packages.get(canonical, []))

    def entry(self, raw_name: str, version: Version) -> SnapshotEntry | None:
        for e in self.entries(raw_name):
            if e.version == version:
                return e
        return None

    def candidates(self, raw_name: str, spec: VersionSpec) -> list[tuple[str, SnapshotEntry]]:
        """(canonical name, entry) pairs satisfying ``spec``, preference order.

        Order is version-descending, then lexicographically smaller name.
        For rpm the raw name is a capability: providers match when the
        requirement accepts both the provide EVR (if versioned) and the
        provider's own version.
        """
        if self.ecosystem is Ecosystem.RPM:
            out = []
            for pkg_name, entry, evr in self._provides.get(raw_name, []):
                if spec.wildcard:
                    out.append((pkg_name, entry))
                    continue
                if evr is None:
                    continue  # unversioned provide cannot satisfy a versioned requirement
                if spec.matches(parse_version(Ecosystem.RPM, evr)) and spec.matches(entry.version):
                    out.append((pkg_name, entry))
            out.sort(key=lambda t: (t[1].version, _NameDesc(t[0])), reverse=True)
            return out
        canonical_entries = self.entries(raw_name)
        try:
            canonical = normalize_name(self.ecosystem, raw_name)
        except Exception:
            return []
        return [(canonical, e) for e in canonical_entries if spec.matches(e.version)]

    def providers_of(self, capability: str) -> list[tuple[str, SnapshotEntry, str | None]]:
        """rpm only: (package name, entry, provide EVR) triples for a capability."""
        return list(self._provides.get(capability, []))

    def known_names(self) -> dict[str, list[SnapshotEntry]]:
        return dict(self._packages)


class _NameDesc(str):
    """Inverts string ordering so one reverse-sort ranks names ascending."""

    def __lt__(self, other):
        return str.__gt__(self, other)

    def __gt__(self, other):
        return str.__lt__(self, other)


def _fname(name: str) -> str:
    return quote(name, safe="") + ".json"


def _entry_to_json(e: SnapshotEntry) -> dict:
    doc = {
        "version": e.version.text,
        "dependencies": [
            {"name": d.name, "spec": d.spec.text, "kind": d.kind.value}
            for d in e.dependencies
        ],
    }
    if e.declared_license:
        doc["license"] = e.declared_license
    if e.declared_repo_url:
        doc["repo_url"] = e.declared_repo_url
    if e.artifact_digest:
        doc["digest"] = e.artifact_digest
    if e.description:
        doc["description"] = e.description
    if e.provides:
        doc["provides"] = [[cap, evr] for cap, evr in e.provides]
    return doc


def _entry_from_json(eco: Ecosystem, doc: dict) -> SnapshotEntry:
    deps = tuple(
        DependencyDecl(d["name"], parse_version_spec(eco, d["spec"]),
                       DependencyKind(d.get("kind", "runtime")))
        for d in doc.get("dependencies", [])
    )
    return SnapshotEntry(
        version=parse_version(eco, doc["version"]),
        dependencies=deps,
        declared_license=doc.get("license"),
        declared_repo_url=doc.get("repo_url"),
        artifact_digest=doc.get("digest"),
        description=doc.get("description"),
        provides=tuple((cap, evr) for cap, evr in doc.get("provides", [])),
    )


def write_snapshots(root: Path, snapshots: dict[Ecosystem, RegistrySnapshot]) -> str:
    """Write the on-disk layout; returns the top-level content digest."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    index: dict = {"ecosystems": {}}
    h = hashlib.sha256()
    for eco in sorted(snapshots, key=lambda e: e.value):
        snap = snapshots[eco]
        eco_dir = root / eco.value
        eco_dir.mkdir(exist_ok=True)
        names = snap.names()
        index["ecosystems"][eco.value] = names
        for name in names:
            doc = {"name": name,
                   "versions": [_entry_to_json(e) for e in snap.known_names()[name]]}
            body = json.dumps(doc, indent=1, sort_keys=True)
            (eco_dir / _fname(name)).write_text(body)
            h.update(f"{eco.value}/{name}".encode())
            h.update(body.encode())
    index["digest"] = h.hexdigest()
    (root / "index.json").write_text(json.dumps(index, indent=1, sort_keys=True))
    return index["digest"]


def load_snapshots(root: Path) -> dict[Ecosystem, RegistrySnapshot]:
    """Load every ecosystem directory under a snapshot root."""
    root = Path(root)
    index_path = root / "index.json"
    if not index_path.is_file():
        raise ParseError(f"snapshot root {root} has no index.json")
    try:
        index = json.loads(index_path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad snapshot index: {exc}") from None
    digest = index.get("digest", "")
    out: dict[Ecosystem, RegistrySnapshot] = {}
    for eco_name, names in index.get("ecosystems", {}).items():
        eco = Ecosystem(eco_name)
        packages: dict[str, list[SnapshotEntry]] = {}
        for name in names:
            path = root / eco_name / _fname(name)
            try:
                doc = json.loads(path.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ParseError(f"bad snapshot document {path}: {exc}") from None
            packages[doc.get("name", unquote(path.stem))] = [
                _entry_from_json(eco, v) for v in doc.get("versions", [])
            ]
        out[eco] = RegistrySnapshot.from_packages(eco, packages, digest=digest)
    return out
