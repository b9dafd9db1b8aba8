"""Shared fixture builders for snapshots, manifests, and random corpora."""

from __future__ import annotations

from pkgdash.manifests import DependencyDecl, DependencyKind, ManifestDoc
from pkgdash.purl import coordinate
from pkgdash.snapshot import RegistrySnapshot, SnapshotEntry
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem, parse_version


def make_dep(eco, name, spec, kind="runtime"):
    return DependencyDecl(name, parse_version_spec(eco, spec), DependencyKind(kind))


def make_snapshot(eco, table, **entry_extras):
    """table: {name: {version: [(dep_name, spec), ...] | dict with extras}}."""
    eco = Ecosystem(eco)
    packages = {}
    for name, versions in table.items():
        entries = []
        for version, payload in versions.items():
            extras = {}
            if isinstance(payload, dict):
                deps = payload.get("deps", [])
                extras = {k: v for k, v in payload.items() if k != "deps"}
            else:
                deps = payload
            entries.append(SnapshotEntry(
                version=parse_version(eco, version),
                dependencies=tuple(make_dep(eco, d[0], d[1], *(d[2:] or ())) for d in deps),
                **extras,
            ))
        packages[name] = entries
    return RegistrySnapshot.from_packages(eco, packages)


def make_manifest(eco, name, version, deps=(), **fields):
    eco = Ecosystem(eco)
    return ManifestDoc(
        coordinate=coordinate(eco, name, version),
        dependencies=[make_dep(eco, d[0], d[1], *(d[2:] or ())) for d in deps],
        **fields,
    ).dedupe()


DIAMOND_SNAPSHOT = {
    "bb": {"1.0.0": [("dd", "^1.0.0")]},
    "cc": {"1.0.0": [("dd", "^1.2.0")]},
    "dd": {"1.0.0": [], "1.2.0": [], "1.5.0": []},
}


def diamond_manifest(eco="npm"):
    return make_manifest(eco, "aa", "1.0.0", [("bb", "^1.0.0"), ("cc", "^1.0.0")])


def diamond_snapshot(eco="npm"):
    return make_snapshot(eco, DIAMOND_SNAPSHOT)


CONFLICT_SNAPSHOT = {
    "bb": {"1.0.0": [("dd", "^2.0.0")]},
    "dd": {"1.1.0": [], "2.2.0": []},
}


def conflict_manifest(eco="npm"):
    # root wants dd ^1.0.0 while bb wants dd ^2.0.0
    return make_manifest(eco, "aa", "1.0.0", [("dd", "^1.0.0"), ("bb", "^1.0.0")])


def conflict_snapshot(eco="npm"):
    return make_snapshot(eco, CONFLICT_SNAPSHOT)
