"""Version parsing and total ordering for npm, pypi, cargo, and rpm.

Each parsed version carries an ecosystem tag and a precomputed sort key;
ordering is only defined within one ecosystem and raises
``EcosystemMismatch`` across tags. Keys are plain tuples so intervals in
``version_specs`` can compare bounds without re-parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from pkgdash.errors import EcosystemMismatch, VersionSyntax


class Ecosystem(str, Enum):
    """Supported package ecosystems."""

    NPM = "npm"
    PYPI = "pypi"
    CARGO = "cargo"
    RPM = "rpm"

    @classmethod
    def parse(cls, value: str) -> "Ecosystem":
        try:
            return cls(value.lower())
        except ValueError:
            raise VersionSyntax(f"unknown ecosystem: {value!r}") from None


# --- semver (npm, cargo) ----------------------------------------------------

_SEMVER_ID = r"(?:0|[1-9]\d*|\d*[A-Za-z-][0-9A-Za-z-]*)"
_SEMVER_RE = re.compile(
    r"^(?P<major>0|[1-9]\d*)\.(?P<minor>0|[1-9]\d*)\.(?P<patch>0|[1-9]\d*)"
    rf"(?:-(?P<pre>{_SEMVER_ID}(?:\.{_SEMVER_ID})*))?"
    r"(?:\+(?P<build>[0-9A-Za-z-]+(?:\.[0-9A-Za-z-]+)*))?$"
)


def _semver_pre_key(ids: tuple[str, ...]) -> tuple:
    # Release versions sort after every prerelease of the same triple.
    if not ids:
        return (1,)
    parts = []
    for ident in ids:
        if ident.isdigit():
            parts.append((0, int(ident)))
        else:
            parts.append((1, ident))
    return (0, tuple(parts))


def _parse_semver(ecosystem: Ecosystem, text: str) -> "Version":
    m = _SEMVER_RE.match(text.strip())
    if not m:
        raise VersionSyntax(f"invalid {ecosystem.value} version: {text!r}")
    major, minor, patch = (int(m.group(g)) for g in ("major", "minor", "patch"))
    pre = tuple(m.group("pre").split(".")) if m.group("pre") else ()
    build = m.group("build") or ""
    key = (major, minor, patch, _semver_pre_key(pre))
    rendered = f"{major}.{minor}.{patch}"
    if pre:
        rendered += "-" + ".".join(pre)
    if build:
        rendered += "+" + build
    return Version(ecosystem, rendered, key, _parts=(major, minor, patch, pre, build))


# --- PEP 440 subset (pypi) --------------------------------------------------
# Release tuple plus pre/post/dev segments; epoch and local versions are
# outside the supported subset and fail to parse.

_PEP440_RE = re.compile(
    r"""^\s*v?
    (?P<release>\d+(?:\.\d+)*)
    (?:[-_.]?(?P<pre_l>alpha|a|beta|b|preview|pre|c|rc)[-_.]?(?P<pre_n>\d+)?)?
    (?:(?:-(?P<post_n1>\d+))|(?:[-_.]?(?P<post_l>post|rev|r)[-_.]?(?P<post_n2>\d+)?))?
    (?:[-_.]?(?P<dev_l>dev)[-_.]?(?P<dev_n>\d+)?)?
    \s*$""",
    re.VERBOSE | re.IGNORECASE,
)

_PRE_LETTER = {"alpha": "a", "a": "a", "beta": "b", "b": "b",
               "c": "rc", "pre": "rc", "preview": "rc", "rc": "rc"}
_PRE_RANK = {"a": 0, "b": 1, "rc": 2}


def pypi_key(release: tuple[int, ...],
             pre: tuple[str, int] | None,
             post: int | None,
             dev: int | None) -> tuple:
    """Comparison key following the published pypi ordering rules.

    Trailing zeros in the release are insignificant; dev-only releases
    sort before prereleases, prereleases before the final, the final
    before post releases.
    """
    rel = release
    while len(rel) > 1 and rel[-1] == 0:
        rel = rel[:-1]
    if rel == (0,):
        rel = (0,)
    if pre is not None:
        pre_key: tuple = (0, _PRE_RANK[pre[0]], pre[1])
    elif post is None and dev is not None:
        pre_key = (-1,)
    else:
        pre_key = (1,)
    post_key = (-1,) if post is None else (0, post)
    dev_key = (0, dev) if dev is not None else (1,)
    return (rel, pre_key, post_key, dev_key)


def _parse_pypi(text: str) -> "Version":
    m = _PEP440_RE.match(text)
    if not m:
        raise VersionSyntax(f"invalid pypi version: {text!r}")
    release = tuple(int(p) for p in m.group("release").split("."))
    pre: tuple[str, int] | None = None
    if m.group("pre_l"):
        pre = (_PRE_LETTER[m.group("pre_l").lower()], int(m.group("pre_n") or 0))
    post: int | None = None
    if m.group("post_n1") is not None:
        post = int(m.group("post_n1"))
    elif m.group("post_l"):
        post = int(m.group("post_n2") or 0)
    dev: int | None = None
    if m.group("dev_l"):
        dev = int(m.group("dev_n") or 0)
    key = pypi_key(release, pre, post, dev)
    rendered = ".".join(str(p) for p in release)
    if pre is not None:
        rendered += f"{pre[0]}{pre[1]}"
    if post is not None:
        rendered += f".post{post}"
    if dev is not None:
        rendered += f".dev{dev}"
    return Version(Ecosystem.PYPI, rendered, key, _parts=(release, pre, post, dev))


# --- rpm (epoch:version-release) --------------------------------------------
# Segment comparison per the published rpm ordering algorithm: separators
# split segments, digit runs compare numerically, letter runs compare as
# strings, a number sorts after letters, "~" sorts before end-of-string
# and "^" after it.

_RPM_PART = re.compile(r"^[A-Za-z0-9._+~^]+$")

_T_TILDE = (0,)
_T_END = (1,)
_T_CARET = (2,)


def rpm_segment_key(s: str) -> tuple:
    """Tokenize one rpm version/release string into a comparable key."""
    toks: list[tuple] = []
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "~":
            toks.append(_T_TILDE)
            i += 1
        elif ch == "^":
            toks.append(_T_CARET)
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(s) and s[j].isdigit():
                j += 1
            toks.append((4, int(s[i:j])))
            i = j
        elif ch.isalpha():
            j = i
            while j < len(s) and s[j].isalpha():
                j += 1
            toks.append((3, s[i:j]))
            i = j
        else:
            i += 1  # separator
    toks.append(_T_END)
    return tuple(toks)


def _parse_rpm(text: str) -> "Version":
    t = text.strip()
    epoch = 0
    if ":" in t:
        epoch_s, _, rest = t.partition(":")
        if not epoch_s.isdigit():
            raise VersionSyntax(f"invalid rpm epoch in {text!r}")
        epoch = int(epoch_s)
        t = rest
    ver, sep, rel = t.partition("-")
    release: str | None = rel if sep else None
    if not ver or not _RPM_PART.match(ver) or (release is not None and not _RPM_PART.match(release)):
        raise VersionSyntax(f"invalid rpm version: {text!r}")
    key = (epoch, rpm_segment_key(ver), rpm_segment_key(release) if release is not None else (_T_END,))
    rendered = (f"{epoch}:" if epoch else "") + ver + (f"-{release}" if release is not None else "")
    return Version(Ecosystem.RPM, rendered, key, _parts=(epoch, ver, release))


@dataclass(frozen=True)
class Version:
    """An ecosystem-tagged version with a precomputed total-order key."""

    ecosystem: Ecosystem
    text: str = field(compare=False)
    key: tuple = field(repr=False)
    _parts: tuple = field(default=(), repr=False, compare=False)

    def _check(self, other: Any) -> "Version":
        if not isinstance(other, Version):
            raise TypeError(f"cannot compare Version with {type(other).__name__}")
        if other.ecosystem != self.ecosystem:
            raise EcosystemMismatch(
                f"cannot compare {self.ecosystem.value} and {other.ecosystem.value} versions")
        return other

    def __lt__(self, other: "Version") -> bool:
        return self.key < self._check(other).key

    def __le__(self, other: "Version") -> bool:
        return self.key <= self._check(other).key

    def __gt__(self, other: "Version") -> bool:
        return self.key > self._check(other).key

    def __ge__(self, other: "Version") -> bool:
        return self.key >= self._check(other).key

    def __str__(self) -> str:
        return self.text

    # -- per-ecosystem views --

    @property
    def release_triple(self) -> tuple[int, int, int]:
        """(major, minor, patch) — npm/cargo only."""
        if self.ecosystem not in (Ecosystem.NPM, Ecosystem.CARGO):
            raise EcosystemMismatch("release_triple is a semver property")
        return self._parts[0], self._parts[1], self._parts[2]

    @property
    def is_prerelease(self) -> bool:
        if self.ecosystem in (Ecosystem.NPM, Ecosystem.CARGO):
            return bool(self._parts[3])
        if self.ecosystem is Ecosystem.PYPI:
            _, pre, _, dev = self._parts
            return pre is not None or dev is not None
        return False

    @property
    def pypi_release(self) -> tuple[int, ...]:
        if self.ecosystem is not Ecosystem.PYPI:
            raise EcosystemMismatch("pypi_release is a pypi property")
        return self._parts[0]

    @property
    def is_postrelease(self) -> bool:
        if self.ecosystem is not Ecosystem.PYPI:
            return False
        return self._parts[2] is not None

    @property
    def rpm_evr(self) -> tuple[int, str, str | None]:
        if self.ecosystem is not Ecosystem.RPM:
            raise EcosystemMismatch("rpm_evr is an rpm property")
        return self._parts


def parse_version(ecosystem: Ecosystem | str, text: str) -> Version:
    """Parse ``text`` as a version of ``ecosystem``.

    Raises ``VersionSyntax`` on anything outside the ecosystem's grammar.
    """
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem.parse(ecosystem)
    if not text or not text.strip():
        raise VersionSyntax("empty version string")
    if eco in (Ecosystem.NPM, Ecosystem.CARGO):
        return _parse_semver(eco, text)
    if eco is Ecosystem.PYPI:
        return _parse_pypi(text)
    return _parse_rpm(text)
