"""Canonical package identity: coordinates, package-URL strings, name rules.

A coordinate is the cross-ecosystem key everything else hangs off:
(ecosystem, optional namespace, canonical name, optional version). The
string form follows the public PURL grammar: ``pkg:`` scheme, lowercase
type, percent-encoded segments. Qualifiers and subpaths are accepted on
parse and dropped — the coordinate model does not carry them — so
parse -> serialize -> parse is a fixed point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import quote, unquote

from pkgdash.errors import IllegalName, MalformedPurl, VersionSyntax
from pkgdash.versions import Ecosystem, Version, parse_version

_PYPI_NAME = re.compile(r"^[a-z0-9]([a-z0-9._-]*[a-z0-9])?$")
_NPM_BARE = re.compile(r"^[a-z0-9~][a-z0-9-._~]*$")
_NPM_SCOPE = re.compile(r"^@[a-z0-9-._~][a-z0-9-._~]*$")
_CARGO_NAME = re.compile(r"^[a-z0-9][a-z0-9_-]*$")
_RPM_NAME = re.compile(r"^[A-Za-z0-9._+-]+$")


def normalize_name(ecosystem: Ecosystem | str, raw: str) -> str:
    """Canonicalize a package name for its ecosystem; idempotent.

    pypi lowercases and collapses runs of ``.``/``_``/``-`` to ``-``;
    npm lowercases, preserving any scope; cargo lowercases verbatim
    (``-`` and ``_`` stay distinct); rpm names pass through unchanged.
    Raises ``IllegalName`` for characters outside the ecosystem grammar.
    """
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
    if not raw:
        raise IllegalName("empty package name")
    if eco is Ecosystem.PYPI:
        name = re.sub(r"[-_.]+", "-", raw.lower())
        if not _PYPI_NAME.match(name):
            raise IllegalName(f"illegal pypi name: {raw!r}")
        return name
    if eco is Ecosystem.NPM:
        name = raw.lower()
        if name.startswith("@"):
            scope, slash, bare = name.partition("/")
            if not slash or not _NPM_SCOPE.match(scope) or not _NPM_BARE.match(bare):
                raise IllegalName(f"illegal npm name: {raw!r}")
        elif not _NPM_BARE.match(name):
            raise IllegalName(f"illegal npm name: {raw!r}")
        return name
    if eco is Ecosystem.CARGO:
        name = raw.lower()
        if not _CARGO_NAME.match(name):
            raise IllegalName(f"illegal cargo name: {raw!r}")
        return name
    if not _RPM_NAME.match(raw):
        raise IllegalName(f"illegal rpm name: {raw!r}")
    return raw


@dataclass(frozen=True)
class PackageCoordinate:
    """Canonical cross-ecosystem package identity, PURL-serializable."""

    ecosystem: Ecosystem
    namespace: str | None
    name: str
    version: Version | None = None

    @property
    def full_name(self) -> str:
        """Namespace-qualified name (npm scope / rpm channel prefix)."""
        if self.namespace and self.ecosystem is Ecosystem.NPM:
            return f"{self.namespace}/{self.name}"
        return self.name

    def with_version(self, version: Version | None) -> "PackageCoordinate":
        return PackageCoordinate(self.ecosystem, self.namespace, self.name, version)

    def without_version(self) -> "PackageCoordinate":
        return self.with_version(None)

    @property
    def purl(self) -> str:
        return serialize_purl(self)

    def __str__(self) -> str:
        return self.purl


def coordinate(ecosystem: Ecosystem | str, name: str,
               version: str | Version | None = None,
               namespace: str | None = None) -> PackageCoordinate:
    """Convenience constructor applying name canonicalization."""
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
    if eco is Ecosystem.NPM and name.startswith("@") and namespace is None:
        full = normalize_name(eco, name)
        namespace, _, name = full.partition("/")
    else:
        name = normalize_name(eco, name)
        if namespace is not None and eco is Ecosystem.NPM:
            namespace = namespace.lower()
    ver = parse_version(eco, version) if isinstance(version, str) else version
    return PackageCoordinate(eco, namespace, name, ver)


def parse_purl(text: str) -> PackageCoordinate:
    """Parse a PURL string into a coordinate with a canonical name.

    Percent-decoding is applied to namespace, name, and version segments;
    qualifiers (``?...``) and subpath (``#...``) are ignored. Raises
    ``MalformedPurl`` for a missing ``pkg:`` scheme, an ecosystem type
    outside {npm, pypi, cargo, rpm}, or an empty name.
    """
    if not text or not text.strip():
        raise MalformedPurl("empty purl")
    s = text.strip()
    scheme, sep, rest = s.partition(":")
    if not sep or scheme.lower() != "pkg":
        raise MalformedPurl(f"missing pkg: scheme in {text!r}")
    rest = rest.lstrip("/")
    rest = rest.split("#", 1)[0]
    rest = rest.split("?", 1)[0]
    version_raw: str | None = None
    at = rest.rfind("@")
    if at > rest.rfind("/"):
        rest, version_raw = rest[:at], rest[at + 1:]
    segments = [seg for seg in rest.split("/") if seg != ""]
    if len(segments) < 2:
        raise MalformedPurl(f"purl needs a type and a name: {text!r}")
    type_raw, *middle, name_raw = segments
    try:
        eco = Ecosystem(type_raw.lower())
    except ValueError:
        raise MalformedPurl(f"unknown ecosystem type {type_raw!r} in {text!r}") from None
    namespace = "/".join(unquote(seg) for seg in middle) if middle else None
    name = unquote(name_raw)
    if not name:
        raise MalformedPurl(f"empty name in {text!r}")
    try:
        if eco is Ecosystem.NPM and namespace:
            namespace = namespace.lower()
            if not _NPM_SCOPE.match(namespace):
                raise IllegalName(f"illegal npm scope: {namespace!r}")
        name = normalize_name(eco, name)
    except IllegalName as exc:
        raise MalformedPurl(str(exc)) from None
    version = None
    if version_raw is not None:
        if not version_raw:
            raise MalformedPurl(f"empty version segment in {text!r}")
        try:
            version = parse_version(eco, unquote(version_raw))
        except VersionSyntax as exc:
            raise MalformedPurl(f"bad version in {text!r}: {exc}") from None
    return PackageCoordinate(eco, namespace, name, version)


def serialize_purl(c: PackageCoordinate) -> str:
    """Render the canonical PURL string for a coordinate."""
    parts = [f"pkg:{c.ecosystem.value}"]
    body = ""
    if c.namespace:
        body += "/".join(quote(seg, safe="") for seg in c.namespace.split("/")) + "/"
    body += quote(c.name, safe="")
    out = f"{parts[0]}/{body}"
    if c.version is not None:
        out += "@" + quote(c.version.text, safe="")
    return out
