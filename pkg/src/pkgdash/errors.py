"""Exception hierarchy shared across the platform."""

from __future__ import annotations


class PkgdashError(Exception):
    """Base class for all platform errors."""


class MalformedPurl(PkgdashError):
    """A package-URL string violates the PURL grammar."""


class IllegalName(PkgdashError):
    """A package name contains characters outside its ecosystem's grammar."""


class VersionSyntax(PkgdashError):
    """A version string cannot be parsed for its ecosystem."""


class SpecSyntax(PkgdashError):
    """A version-requirement string is outside the supported grammar subset."""


class EcosystemMismatch(PkgdashError):
    """Two ecosystem-tagged values from different ecosystems were combined."""


class ParseError(PkgdashError):
    """A manifest, lockfile, or metadata document is syntactically invalid."""


class SchemaError(PkgdashError):
    """A document parsed but is missing required fields."""


class UnsupportedLockVersion(PkgdashError):
    """A lockfile declares a format version outside the supported set."""


class UnresolvableDependency(PkgdashError):
    """No version in the snapshot satisfies a requirement.

    ``chain`` names the requirement path from the root to the failing
    requirement, e.g. ``["root", "b ^1.0.0", "d ^9.0.0"]``.
    """

    def __init__(self, message: str, chain: list[str] | None = None):
        super().__init__(message)
        self.chain = chain or []


class BacktrackExhausted(PkgdashError):
    """Flat-strategy resolution gave up after the backtrack-step bound.

    ``conflicts`` carries the requirement strings involved in the last
    observed conflict.
    """

    def __init__(self, message: str, conflicts: list[str] | None = None):
        super().__init__(message)
        self.conflicts = conflicts or []


class DepthExceeded(PkgdashError):
    """Resolution hit the configured depth bound in strict mode."""


class MissingFromSnapshot(PkgdashError):
    """A lock pin names a package absent from the registry snapshot."""


class ValidationError(PkgdashError):
    """A record violates its invariants and cannot be stored."""
