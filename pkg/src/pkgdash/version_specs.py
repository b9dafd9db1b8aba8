"""Version-requirement parsing and membership for npm, pypi, cargo, and rpm.

A parsed requirement is normalized to a sorted list of disjoint intervals
over version sort keys, plus the prerelease opt-in state:

* npm/cargo follow the native rule that a prerelease version only matches
  when some comparator in the requirement names a prerelease with the same
  (major, minor, patch) triple — tracked as ``anchors``.
* pypi follows the native rule that prereleases match only when some
  comparator operand is itself a prerelease — tracked set-wide.
* rpm has no prerelease concept; tilde/caret segments are plain ordering.

Supported grammar subsets (anything else raises ``SpecSyntax``):

* npm: exact, ``*``/``x``, caret, tilde, bare partials (``1``, ``1.2``,
  ``1.2.x``), and space-joined comparator chains with full operands.
* cargo: caret (bare or explicit), tilde, ``=``, ``*`` wildcards
  (``1.*``), comma-joined comparators with full operands.
* pypi: ``==``, ``!=``, ``~=``, ``>=``, ``<=``, ``>``, ``<``, comma-joined.
* rpm: exact EVR, ``=``/``>=``/``>``/``<=``/``<`` comparators, ``*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from pkgdash.errors import EcosystemMismatch, SpecSyntax, VersionSyntax
from pkgdash.versions import Ecosystem, Version, parse_version, pypi_key, rpm_segment_key

# Sentinel key components ordered against every real component.
_REL_MIN = ((-1,),)
_REL_MAX = ((9,),)


@dataclass(frozen=True)
class Interval:
    """A half-open or closed interval over version sort keys.

    ``None`` bounds are unbounded. Bounds may be synthetic keys that no
    real version renders to (used for prefix and segment exclusions).
    """

    low: tuple | None
    low_inc: bool
    high: tuple | None
    high_inc: bool

    def contains(self, key: tuple) -> bool:
        if self.low is not None:
            if key < self.low or (key == self.low and not self.low_inc):
                return False
        if self.high is not None:
            if key > self.high or (key == self.high and not self.high_inc):
                return False
        return True

    def is_empty(self) -> bool:
        if self.low is None or self.high is None:
            return False
        if self.low > self.high:
            return True
        return self.low == self.high and not (self.low_inc and self.high_inc)


_UNIVERSE = Interval(None, False, None, False)


def _intersect_pair(a: Interval, b: Interval) -> Interval | None:
    low, low_inc = a.low, a.low_inc
    if b.low is not None and (low is None or b.low > low or (b.low == low and not b.low_inc)):
        low, low_inc = b.low, b.low_inc
    high, high_inc = a.high, a.high_inc
    if b.high is not None and (high is None or b.high < high or (b.high == high and not b.high_inc)):
        high, high_inc = b.high, b.high_inc
    out = Interval(low, low_inc, high, high_inc)
    return None if out.is_empty() else out


def _intersect(lists: list[list[Interval]]) -> tuple[Interval, ...]:
    acc = [_UNIVERSE]
    for ivs in lists:
        nxt: list[Interval] = []
        for a in acc:
            for b in ivs:
                got = _intersect_pair(a, b)
                if got is not None:
                    nxt.append(got)
        acc = nxt
        if not acc:
            break
    acc.sort(key=lambda iv: (iv.low is not None, iv.low or ()))
    return tuple(acc)


@dataclass(frozen=True)
class VersionSpec:
    """A normalized version requirement for one ecosystem."""

    ecosystem: Ecosystem
    text: str = field(compare=False)
    intervals: tuple[Interval, ...] = ()
    anchors: frozenset = frozenset()
    allow_all_prereleases: bool = False
    exact_pin: Version | None = None
    wildcard: bool = False

    def matches(self, v: Version) -> bool:
        return spec_matches(self, v)

    def __str__(self) -> str:
        return self.text


def spec_matches(spec: VersionSpec, v: Version) -> bool:
    """True iff ``v`` lies in the requirement's interval set.

    Deterministic and side-effect free; raises ``EcosystemMismatch`` when
    the requirement and version carry different ecosystem tags.
    """
    if spec.ecosystem != v.ecosystem:
        raise EcosystemMismatch(
            f"spec is {spec.ecosystem.value}, version is {v.ecosystem.value}")
    if not any(iv.contains(v.key) for iv in spec.intervals):
        return False
    if v.is_prerelease and not spec.allow_all_prereleases:
        if spec.ecosystem in (Ecosystem.NPM, Ecosystem.CARGO):
            return v.release_triple in spec.anchors
        return False
    return True


# --- semver builders ---------------------------------------------------------

_PARTIAL_RE = re.compile(
    r"^(?P<major>0|[1-9]\d*)"
    r"(?:\.(?P<minor>0|[1-9]\d*|x|X|\*))?"
    r"(?:\.(?P<patch>0|[1-9]\d*|x|X|\*))?$"
)


def _semver_key(major: int, minor: int, patch: int, zero_pre: bool = False) -> tuple:
    # zero_pre builds the "X.Y.Z-0" style exclusive upper bound: the
    # smallest possible prerelease of the triple.
    pre = (0, ((0, 0),)) if zero_pre else (1,)
    return (major, minor, patch, pre)


def _parse_partial(token: str) -> tuple[int, int | None, int | None] | None:
    m = _PARTIAL_RE.match(token)
    if not m:
        return None
    major = int(m.group("major"))
    minor_s, patch_s = m.group("minor"), m.group("patch")
    minor = None if minor_s in (None, "x", "X", "*") else int(minor_s)
    patch = None if patch_s in (None, "x", "X", "*") else int(patch_s)
    if minor is None and patch is not None:
        return None
    return major, minor, patch


def _caret_interval(eco: Ecosystem, v: Version, zero_pre: bool) -> Interval:
    major, minor, patch = v.release_triple
    if major > 0:
        high = _semver_key(major + 1, 0, 0, zero_pre)
    elif minor > 0:
        high = _semver_key(0, minor + 1, 0, zero_pre)
    else:
        high = _semver_key(0, 0, patch + 1, zero_pre)
    return Interval(v.key, True, high, False)


def _caret_partial_interval(major: int, minor: int | None, zero_pre: bool) -> Interval:
    low = _semver_key(major, minor or 0, 0)
    if minor is None or major > 0:
        high = _semver_key(major + 1, 0, 0, zero_pre)
    else:
        high = _semver_key(0, minor + 1, 0, zero_pre)
    return Interval(low, True, high, False)


def _tilde_interval(eco: Ecosystem, v: Version, zero_pre: bool) -> Interval:
    major, minor, _ = v.release_triple
    return Interval(v.key, True, _semver_key(major, minor + 1, 0, zero_pre), False)


def _xrange_interval(major: int, minor: int | None, zero_pre: bool) -> Interval:
    if minor is None:
        return Interval(_semver_key(major, 0, 0), True,
                        _semver_key(major + 1, 0, 0, zero_pre), False)
    return Interval(_semver_key(major, minor, 0), True,
                    _semver_key(major, minor + 1, 0, zero_pre), False)


def _semver_full(eco: Ecosystem, token: str, what: str) -> Version:
    try:
        return parse_version(eco, token)
    except VersionSyntax:
        raise SpecSyntax(f"{what} operand must be a full version: {token!r}") from None


def _parse_npm(text: str) -> VersionSpec:
    stripped = text.strip()
    if stripped in ("*", "x", "X"):
        return VersionSpec(Ecosystem.NPM, stripped, (_UNIVERSE,), wildcard=True)
    parts: list[list[Interval]] = []
    anchors: set = set()
    exact: Version | None = None
    tokens = stripped.split()
    if "||" in stripped or "-" in [t for t in tokens]:
        raise SpecSyntax(f"unsupported npm range syntax: {text!r}")
    for tok in tokens:
        if tok.startswith("^"):
            body = tok[1:]
            partial = _parse_partial(body)
            if partial and partial[2] is None:
                parts.append([_caret_partial_interval(partial[0], partial[1], True)])
            else:
                v = _semver_full(Ecosystem.NPM, body, "caret")
                if v.is_prerelease:
                    anchors.add(v.release_triple)
                parts.append([_caret_interval(Ecosystem.NPM, v, True)])
        elif tok.startswith("~"):
            body = tok[1:]
            partial = _parse_partial(body)
            if partial and partial[2] is None:
                if partial[1] is None:
                    parts.append([_xrange_interval(partial[0], None, True)])
                else:
                    parts.append([_xrange_interval(partial[0], partial[1], True)])
            else:
                v = _semver_full(Ecosystem.NPM, body, "tilde")
                if v.is_prerelease:
                    anchors.add(v.release_triple)
                parts.append([_tilde_interval(Ecosystem.NPM, v, True)])
        elif tok[:2] in (">=", "<="):
            v = _semver_full(Ecosystem.NPM, tok[2:], "comparator")
            if v.is_prerelease:
                anchors.add(v.release_triple)
            if tok[0] == ">":
                parts.append([Interval(v.key, True, None, False)])
            else:
                parts.append([Interval(None, False, v.key, True)])
        elif tok[0] in (">", "<", "="):
            v = _semver_full(Ecosystem.NPM, tok[1:], "comparator")
            if v.is_prerelease:
                anchors.add(v.release_triple)
            if tok[0] == ">":
                parts.append([Interval(v.key, False, None, False)])
            elif tok[0] == "<":
                parts.append([Interval(None, False, v.key, False)])
            else:
                parts.append([Interval(v.key, True, v.key, True)])
                if len(tokens) == 1:
                    exact = v
        else:
            partial = _parse_partial(tok)
            if partial and partial[2] is None:
                parts.append([_xrange_interval(partial[0], partial[1], True)])
            else:
                v = _semver_full(Ecosystem.NPM, tok, "version")
                if v.is_prerelease:
                    anchors.add(v.release_triple)
                parts.append([Interval(v.key, True, v.key, True)])
                if len(tokens) == 1:
                    exact = v
    return VersionSpec(Ecosystem.NPM, stripped, _intersect(parts),
                       frozenset(anchors), exact_pin=exact)


def _parse_cargo(text: str) -> VersionSpec:
    stripped = text.strip()
    if stripped == "*":
        return VersionSpec(Ecosystem.CARGO, stripped, (_UNIVERSE,), wildcard=True)
    parts: list[list[Interval]] = []
    anchors: set = set()
    exact: Version | None = None
    reqs = [r.strip() for r in stripped.split(",")]
    if any(not r for r in reqs):
        raise SpecSyntax(f"empty comparator in cargo requirement: {text!r}")
    for req in reqs:
        if req.startswith("="):
            v = _semver_full(Ecosystem.CARGO, req[1:].strip(), "exact")
            if v.is_prerelease:
                anchors.add(v.release_triple)
            parts.append([Interval(v.key, True, v.key, True)])
            if len(reqs) == 1:
                exact = v
        elif req[:2] in (">=", "<="):
            v = _semver_full(Ecosystem.CARGO, req[2:].strip(), "comparator")
            if v.is_prerelease:
                anchors.add(v.release_triple)
            if req[0] == ">":
                parts.append([Interval(v.key, True, None, False)])
            else:
                parts.append([Interval(None, False, v.key, True)])
        elif req[0] in (">", "<"):
            v = _semver_full(Ecosystem.CARGO, req[1:].strip(), "comparator")
            if v.is_prerelease:
                anchors.add(v.release_triple)
            if req[0] == ">":
                parts.append([Interval(v.key, False, None, False)])
            else:
                parts.append([Interval(None, False, v.key, False)])
        elif req.startswith("~"):
            body = req[1:].strip()
            partial = _parse_partial(body)
            if partial and partial[2] is None:
                if partial[1] is None:
                    parts.append([_xrange_interval(partial[0], None, False)])
                else:
                    parts.append([_xrange_interval(partial[0], partial[1], False)])
            else:
                v = _semver_full(Ecosystem.CARGO, body, "tilde")
                if v.is_prerelease:
                    anchors.add(v.release_triple)
                parts.append([_tilde_interval(Ecosystem.CARGO, v, False)])
        else:
            body = req[1:].strip() if req.startswith("^") else req
            if body.endswith(".*") or body.endswith(".x"):
                partial = _parse_partial(body)
                if partial is None or partial[2] is not None:
                    raise SpecSyntax(f"bad cargo wildcard: {req!r}")
                parts.append([_xrange_interval(partial[0], partial[1], False)])
                continue
            partial = _parse_partial(body)
            if partial and partial[2] is None:
                parts.append([_caret_partial_interval(partial[0], partial[1], False)])
            else:
                v = _semver_full(Ecosystem.CARGO, body, "caret")
                if v.is_prerelease:
                    anchors.add(v.release_triple)
                parts.append([_caret_interval(Ecosystem.CARGO, v, False)])
    return VersionSpec(Ecosystem.CARGO, stripped, _intersect(parts),
                       frozenset(anchors), exact_pin=exact)


# --- pypi builder ------------------------------------------------------------

_PYPI_OP_RE = re.compile(r"^\s*(==|!=|~=|>=|<=|>|<)\s*(.+?)\s*$")


def _pypi_rel_infimum(release: tuple[int, ...]) -> tuple:
    # Smallest key of any version whose release is >= `release`:
    # the ".dev0" of that release.
    return pypi_key(release, None, None, 0)


def _pypi_post_segment(release_key: tuple, pre_key: tuple) -> tuple[tuple, tuple]:
    # Keys of the contiguous run of post-releases sharing one base version
    # (same release and same pre segment).
    low = (release_key, pre_key, (0, 0), (0, 0))
    sup = (release_key, pre_key, (1,), (1,))
    return low, sup


def _parse_pypi_spec(text: str) -> VersionSpec:
    stripped = text.strip()
    if stripped == "*":
        # No-constraint marker (a bare requirement line); prereleases stay
        # excluded, matching the native installer's empty specifier set.
        return VersionSpec(Ecosystem.PYPI, stripped, (_UNIVERSE,), wildcard=True)
    parts: list[list[Interval]] = []
    allow_pre = False
    exact: Version | None = None
    clauses = [c for c in (s.strip() for s in stripped.split(",")) if c]
    if not clauses:
        raise SpecSyntax(f"empty pypi requirement: {text!r}")
    for clause in clauses:
        m = _PYPI_OP_RE.match(clause)
        if not m:
            raise SpecSyntax(f"unsupported pypi specifier: {clause!r}")
        op, operand = m.group(1), m.group(2)
        if operand.endswith(".*"):
            raise SpecSyntax(f"prefix matching is outside the supported subset: {clause!r}")
        try:
            v = parse_version(Ecosystem.PYPI, operand)
        except VersionSyntax:
            raise SpecSyntax(f"bad version in pypi specifier: {clause!r}") from None
        # "!=" naming a prerelease does not opt the set in; every other
        # operator does. Mirrors the native installer's specifier engine.
        if v.is_prerelease and op != "!=":
            allow_pre = True
        rel_key = v.key[0]
        if op == "==":
            parts.append([Interval(v.key, True, v.key, True)])
            if len(clauses) == 1:
                exact = v
        elif op == "!=":
            parts.append([Interval(None, False, v.key, False),
                          Interval(v.key, False, None, False)])
        elif op == ">=":
            parts.append([Interval(v.key, True, None, False)])
        elif op == "<=":
            parts.append([Interval(None, False, v.key, True)])
        elif op == ">":
            if v.is_postrelease:
                parts.append([Interval(v.key, False, None, False)])
            else:
                # Post-releases of the named version itself never match.
                seg_low, seg_sup = _pypi_post_segment(rel_key, v.key[1])
                parts.append([Interval(v.key, False, seg_low, False),
                              Interval(seg_sup, False, None, False)])
        elif op == "<":
            if v.is_prerelease or v.is_postrelease:
                parts.append([Interval(None, False, v.key, False)])
            else:
                # A plain release: its own pre-releases never match.
                parts.append([Interval(None, False, _pypi_rel_infimum(v.pypi_release), False)])
        else:  # ~=
            release = v.pypi_release
            if len(release) < 2:
                raise SpecSyntax(f"~= needs at least two release segments: {clause!r}")
            prefix = release[:-1]
            upper = prefix[:-1] + (prefix[-1] + 1,)
            parts.append([Interval(v.key, True, _pypi_rel_infimum(upper), False)])
    return VersionSpec(Ecosystem.PYPI, stripped, _intersect(parts),
                       allow_all_prereleases=allow_pre, exact_pin=exact)


# --- rpm builder -------------------------------------------------------------

_RPM_SPEC_RE = re.compile(r"^\s*(==|=|>=|<=|>|<)?\s*(\S+)\s*$")


def _parse_rpm_spec(text: str) -> VersionSpec:
    stripped = text.strip()
    if stripped == "*":
        return VersionSpec(Ecosystem.RPM, stripped, (_UNIVERSE,),
                           allow_all_prereleases=True, wildcard=True)
    m = _RPM_SPEC_RE.match(stripped)
    if not m:
        raise SpecSyntax(f"unsupported rpm requirement: {text!r}")
    op = m.group(1) or "="
    if op == "==":
        op = "="
    try:
        v = parse_version(Ecosystem.RPM, m.group(2))
    except VersionSyntax:
        raise SpecSyntax(f"bad EVR in rpm requirement: {text!r}") from None
    epoch, _, release = v.rpm_evr
    vkey = v.key
    if release is None:
        # Requirement without a release constrains epoch+version only.
        lo = (vkey[0], vkey[1], _REL_MIN)
        hi = (vkey[0], vkey[1], _REL_MAX)
        table = {
            "=": Interval(lo, True, hi, True),
            ">=": Interval(lo, True, None, False),
            ">": Interval(hi, False, None, False),
            "<=": Interval(None, False, hi, True),
            "<": Interval(None, False, lo, False),
        }
    else:
        table = {
            "=": Interval(vkey, True, vkey, True),
            ">=": Interval(vkey, True, None, False),
            ">": Interval(vkey, False, None, False),
            "<=": Interval(None, False, vkey, True),
            "<": Interval(None, False, vkey, False),
        }
    exact = v if op == "=" and release is not None else None
    return VersionSpec(Ecosystem.RPM, stripped, (table[op],),
                       allow_all_prereleases=True, exact_pin=exact)


def parse_version_spec(ecosystem: Ecosystem | str, text: str) -> VersionSpec:
    """Parse a version requirement; raises ``SpecSyntax`` outside the subset."""
    eco = ecosystem if isinstance(ecosystem, Ecosystem) else Ecosystem(ecosystem)
    if text is None or not str(text).strip():
        raise SpecSyntax("empty requirement string")
    if eco is Ecosystem.NPM:
        return _parse_npm(text)
    if eco is Ecosystem.CARGO:
        return _parse_cargo(text)
    if eco is Ecosystem.PYPI:
        return _parse_pypi_spec(text)
    return _parse_rpm_spec(text)


def universal_spec(ecosystem: Ecosystem) -> VersionSpec:
    """The requirement every version of the ecosystem satisfies."""
    return parse_version_spec(ecosystem, "*")
