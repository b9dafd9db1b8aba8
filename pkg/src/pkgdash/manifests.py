"""Uniform manifest/lockfile documents and the per-ecosystem dispatch.

Adapters never invent data: any field absent from the source document is
absent here. Dependency names are kept raw as written; canonicalization
happens at resolution time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from pkgdash.errors import ParseError, UnsupportedLockVersion
from pkgdash.purl import PackageCoordinate
from pkgdash.version_specs import VersionSpec
from pkgdash.versions import Ecosystem


class DependencyKind(str, Enum):
    RUNTIME = "runtime"
    DEV = "dev"
    OPTIONAL = "optional"


@dataclass(frozen=True)
class DependencyDecl:
    """One declared requirement: raw name, parsed spec, dependency kind."""

    name: str
    spec: VersionSpec
    kind: DependencyKind = DependencyKind.RUNTIME


@dataclass
class ManifestDoc:
    """Parsed manifest: identity, descriptive metadata, declared requirements."""

    coordinate: PackageCoordinate
    description: str | None = None
    declared_license: str | None = None
    declared_repo_url: str | None = None
    dependencies: list[DependencyDecl] = field(default_factory=list)

    def dedupe(self) -> "ManifestDoc":
        """Drop exact duplicate (name, kind) pairs, first occurrence wins."""
        seen: set[tuple[str, DependencyKind]] = set()
        out = []
        for dep in self.dependencies:
            key = (dep.name, dep.kind)
            if key not in seen:
                seen.add(key)
                out.append(dep)
        self.dependencies = out
        return self


@dataclass(frozen=True)
class LockPin:
    """One exactly-pinned package from a lockfile."""

    coordinate: PackageCoordinate
    resolved_from_spec: VersionSpec | None = None
    parent: PackageCoordinate | None = None
    artifact_digest: str | None = None


@dataclass
class LockDoc:
    """Parsed lockfile: a root plus its exact pins."""

    root: PackageCoordinate
    pins: list[LockPin] = field(default_factory=list)


@dataclass(frozen=True)
class RpmPackageMeta:
    """One package entry from rpm repodata primary metadata."""

    name: str
    evr: str
    summary: str | None = None
    license: str | None = None
    url: str | None = None
    provides: tuple = ()  # (capability name, evr string or None)
    requires: tuple = ()  # (capability name, requirement string e.g. ">= 1.2-1" or "*")
    checksum: str | None = None


def _decode(content: bytes) -> str:
    try:
        return content.decode("utf-8")
    except (UnicodeDecodeError, AttributeError) as exc:
        raise ParseError(f"content is not valid UTF-8: {exc}") from None


def parse_manifest(ecosystem: Ecosystem | str, content: bytes) -> ManifestDoc:
    """Parse an ecosystem-native manifest into a uniform document.

    Raises ``ParseError`` on syntax problems and ``SchemaError`` when a
    required field (the package name) is missing. Unknown fields are
    ignored.
    """
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
    from pkgdash.adapters import cargo, npm, pypi, rpm
    handler = {
        Ecosystem.NPM: npm.parse_manifest,
        Ecosystem.PYPI: pypi.parse_manifest,
        Ecosystem.CARGO: cargo.parse_manifest,
        Ecosystem.RPM: rpm.parse_manifest,
    }[eco]
    return handler(content).dedupe()


def parse_lockfile(ecosystem: Ecosystem | str, content: bytes) -> LockDoc:
    """Parse a lockfile; every installed package appears once per (name, version)."""
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
    from pkgdash.adapters import cargo, npm, pypi
    if eco is Ecosystem.RPM:
        raise UnsupportedLockVersion("rpm has no lockfile format in the supported set")
    handler = {
        Ecosystem.NPM: npm.parse_lockfile,
        Ecosystem.PYPI: pypi.parse_lockfile,
        Ecosystem.CARGO: cargo.parse_lockfile,
    }[eco]
    return handler(content)


def parse_rpm_primary(content: bytes) -> list[RpmPackageMeta]:
    """Parse a repodata primary-metadata document (XML subset)."""
    from pkgdash.adapters import rpm
    return rpm.parse_primary(content)
