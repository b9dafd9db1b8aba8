"""Identity layer: purl parsing, name rules, versions, requirement matching."""

import json
import random
from pathlib import Path

import pytest

from pkgdash.errors import (
    EcosystemMismatch,
    IllegalName,
    MalformedPurl,
    SpecSyntax,
    VersionSyntax,
)
from pkgdash.purl import PackageCoordinate, normalize_name, parse_purl, serialize_purl
from pkgdash.version_specs import parse_version_spec, spec_matches, universal_spec
from pkgdash.versions import Ecosystem, parse_version

from oracles import rpm_evr_cmp, semver_cmp

FIXTURES = Path(__file__).parent / "fixtures"


def load_vectors():
    return json.loads((FIXTURES / "purl_vectors.json").read_text())


class TestPurl:
    @pytest.mark.parametrize("vec", [v for v in load_vectors() if not v["invalid"]],
                             ids=lambda v: v["description"])
    def test_valid_vector(self, vec):
        c = parse_purl(vec["purl"])
        assert c.ecosystem.value == vec["type"]
        assert c.namespace == vec["namespace"]
        assert c.name == vec["name"]
        if vec["version"] is None:
            assert c.version is None
        else:
            assert c.version == parse_version(vec["type"], vec["version"])
        assert serialize_purl(c) == vec["canonical"]

    @pytest.mark.parametrize("vec", [v for v in load_vectors() if not v["invalid"]],
                             ids=lambda v: v["description"])
    def test_round_trip_fixed_point(self, vec):
        first = parse_purl(vec["purl"])
        again = parse_purl(serialize_purl(first))
        assert again == first
        assert serialize_purl(again) == serialize_purl(first)

    @pytest.mark.parametrize("vec", [v for v in load_vectors() if v["invalid"]],
                             ids=lambda v: v["description"])
    def test_invalid_vector(self, vec):
        with pytest.raises(MalformedPurl):
            parse_purl(vec["purl"])

    def test_examples_from_contract(self):
        c = parse_purl("pkg:npm/lodash@4.17.21")
        assert (c.ecosystem, c.namespace, c.name, c.version.text) == \
            (Ecosystem.NPM, None, "lodash", "4.17.21")
        c = parse_purl("pkg:pypi/Django@4.2")
        assert c.name == "django"
        with pytest.raises(MalformedPurl):
            parse_purl("npm/lodash@1.0.0")
        scoped = PackageCoordinate(Ecosystem.NPM, "@scope", "pkg",
                                   parse_version("npm", "1.0.0"))
        assert serialize_purl(scoped) == "pkg:npm/%40scope/pkg@1.0.0"
        unversioned = PackageCoordinate(Ecosystem.PYPI, None, "django", None)
        assert serialize_purl(unversioned) == "pkg:pypi/django"
        c = PackageCoordinate(Ecosystem.CARGO, None, "serde-like-name",
                              parse_version("cargo", "1.0.0"))
        assert parse_purl(serialize_purl(c)) == c


class TestNormalizeName:
    def test_pypi_collapse(self):
        assert normalize_name("pypi", "Foo._-Bar") == "foo-bar"

    def test_npm_scope(self):
        assert normalize_name("npm", "@Scope/Pkg") == "@scope/pkg"

    def test_rpm_verbatim(self):
        assert normalize_name("rpm", "glibc-devel") == "glibc-devel"

    def test_cargo_keeps_separators_distinct(self):
        assert normalize_name("cargo", "serde_json") == "serde_json"
        assert normalize_name("cargo", "serde-json") == "serde-json"

    @pytest.mark.parametrize("eco", ["npm", "pypi", "cargo", "rpm"])
    def test_idempotent(self, eco):
        rng = random.Random(3)
        samples = {
            "npm": ["@Scope/Pkg", "Lodash", "left-pad", "under_score"],
            "pypi": ["Foo._-Bar", "requests", "A.B_C-D", "x9"],
            "cargo": ["Serde_JSON", "rand", "tokio-util"],
            "rpm": ["glibc-devel", "gtk+", "python3.11", "NetworkManager"],
        }[eco]
        for raw in samples:
            once = normalize_name(eco, raw)
            assert normalize_name(eco, once) == once
        del rng

    def test_illegal(self):
        with pytest.raises(IllegalName):
            normalize_name("pypi", "-bad")
        with pytest.raises(IllegalName):
            normalize_name("npm", "bad name")
        with pytest.raises(IllegalName):
            normalize_name("cargo", "nope!")
        with pytest.raises(IllegalName):
            normalize_name("rpm", "have space")


def _rand_semver(rng, pre_p=0.4):
    s = f"{rng.randint(0, 4)}.{rng.randint(0, 6)}.{rng.randint(0, 6)}"
    if rng.random() < pre_p:
        ids = [rng.choice(["alpha", "beta", "rc", str(rng.randint(0, 5))])
               for _ in range(rng.randint(1, 3))]
        s += "-" + ".".join(ids)
    return s


def _rand_pypi(rng):
    s = ".".join(str(rng.randint(0, 6)) for _ in range(rng.randint(1, 3)))
    used_pre = False
    if rng.random() < 0.25:
        s += rng.choice(["a", "b", "rc"]) + str(rng.randint(0, 2))
        used_pre = True
    if rng.random() < 0.15:
        return s + ".post" + str(rng.randint(0, 2))
    if not used_pre and rng.random() < 0.15:
        s += ".dev" + str(rng.randint(0, 2))
    return s


def _rand_evr(rng):
    segs = [rng.choice([str(rng.randint(0, 20)), "fc", "git", "rc",
                        str(rng.randint(0, 9)) + rng.choice(["a", "b", ""])])
            for _ in range(rng.randint(1, 3))]
    v = ".".join(segs)
    if rng.random() < 0.15:
        v += "~" + rng.choice(["rc1", "beta", "0"])
    out = (f"{rng.randint(0, 3)}:" if rng.random() < 0.2 else "") + v
    if rng.random() < 0.8:
        out += "-" + rng.choice([str(rng.randint(1, 30)), f"1.fc{rng.randint(30, 40)}"])
    return out


class TestVersionOrdering:
    """1,000+ randomized pairs per ecosystem against independent oracles."""

    def test_semver_order_against_oracle(self):
        rng = random.Random(101)
        for eco in ("npm", "cargo"):
            for _ in range(1000):
                a, b = _rand_semver(rng), _rand_semver(rng)
                va, vb = parse_version(eco, a), parse_version(eco, b)
                mine = 0 if va == vb else (-1 if va < vb else 1)
                assert mine == semver_cmp(a, b), (eco, a, b)

    def test_pypi_order_against_packaging(self):
        from packaging.version import Version as RefVersion
        rng = random.Random(102)
        for _ in range(1000):
            a, b = _rand_pypi(rng), _rand_pypi(rng)
            va, vb = parse_version("pypi", a), parse_version("pypi", b)
            ra, rb = RefVersion(a), RefVersion(b)
            assert (va < vb, va == vb, va > vb) == (ra < rb, ra == rb, ra > rb), (a, b)

    def test_rpm_order_against_oracle(self):
        rng = random.Random(103)
        for _ in range(1000):
            a, b = _rand_evr(rng), _rand_evr(rng)
            va, vb = parse_version("rpm", a), parse_version("rpm", b)
            mine = 0 if va == vb else (-1 if va < vb else 1)
            assert mine == rpm_evr_cmp(a, b), (a, b)

    def test_parse_render_round_trip(self):
        rng = random.Random(104)
        for eco, gen in (("npm", _rand_semver), ("cargo", _rand_semver),
                         ("pypi", _rand_pypi), ("rpm", _rand_evr)):
            for _ in range(300):
                v = parse_version(eco, gen(rng))
                assert parse_version(eco, v.text) == v

    def test_cross_ecosystem_comparison_is_error(self):
        a = parse_version("npm", "1.0.0")
        b = parse_version("cargo", "1.0.0")
        assert a != b
        with pytest.raises(EcosystemMismatch):
            _ = a < b

    def test_bad_versions(self):
        with pytest.raises(VersionSyntax):
            parse_version("npm", "1.2")
        with pytest.raises(VersionSyntax):
            parse_version("npm", "not..a..version")
        with pytest.raises(VersionSyntax):
            parse_version("pypi", "1!2.0")
        with pytest.raises(VersionSyntax):
            parse_version("rpm", "bad version")


class TestSpecMembership:
    """Frozen native-tool oracle tables, 1,000+ cases per ecosystem."""

    @pytest.mark.parametrize("eco", ["npm", "cargo", "pypi", "rpm"])
    def test_membership_tables(self, eco):
        table = json.loads((FIXTURES / "membership" / f"{eco}.json").read_text())
        assert len(table) >= 1000
        disagreements = []
        for case in table:
            spec = parse_version_spec(eco, case["spec"])
            v = parse_version(eco, case["version"])
            if spec.matches(v) != case["matches"]:
                disagreements.append(case)
        assert disagreements == []

    def test_examples_from_contract(self):
        caret = parse_version_spec("npm", "^1.2.3")
        assert spec_matches(caret, parse_version("npm", "1.9.0"))
        assert not spec_matches(caret, parse_version("npm", "2.0.0"))
        band = parse_version_spec("pypi", ">=2.0,<3.0")
        assert spec_matches(band, parse_version("pypi", "2.5"))
        assert not spec_matches(band, parse_version("pypi", "3.0"))
        star = parse_version_spec("npm", "*")
        assert star.wildcard
        assert spec_matches(star, parse_version("npm", "0.0.1"))
        pin = parse_version_spec("npm", "1.0.0")
        assert pin.exact_pin == parse_version("npm", "1.0.0")
        assert spec_matches(pin, parse_version("npm", "1.0.0"))

    def test_intervals_are_sorted_and_disjoint(self):
        rng = random.Random(105)
        specs = ["^1.2.3", ">=1.0.0 <2.0.0", "~0.4.2"]
        specs += [f">={_rand_semver(rng, 0)} <{_rand_semver(rng, 0)}" for _ in range(50)]
        for text in specs:
            spec = parse_version_spec("npm", text)
            ivs = spec.intervals
            for a, b in zip(ivs, ivs[1:]):
                assert a.low is None or b.low is not None
                if a.high is not None and b.low is not None:
                    assert a.high <= b.low
        neq = parse_version_spec("pypi", "!=1.5,>=1.0")
        assert len(neq.intervals) == 2
        lows = [iv.low for iv in neq.intervals]
        assert lows == sorted(lows, key=lambda x: (x is not None, x or ()))

    def test_mismatched_ecosystem(self):
        spec = parse_version_spec("npm", "^1.0.0")
        with pytest.raises(EcosystemMismatch):
            spec_matches(spec, parse_version("pypi", "1.0"))

    def test_unsupported_syntax_fails_loudly(self):
        for eco, text in [("npm", "1.2.3 - 2.0.0"), ("npm", "^1.0.0 || ^2.0.0"),
                          ("pypi", "==1.*"), ("pypi", "===1.0"),
                          ("cargo", ">=1.2"), ("npm", ">=1.2"),
                          ("rpm", "(foo or bar)")]:
            with pytest.raises(SpecSyntax):
                parse_version_spec(eco, text)

    def test_universal_spec(self):
        for eco in Ecosystem:
            u = universal_spec(eco)
            assert u.wildcard
        assert universal_spec(Ecosystem.RPM).matches(parse_version("rpm", "1.0~rc1-1"))
        # wildcard does not admit prereleases outside rpm
        assert not universal_spec(Ecosystem.NPM).matches(parse_version("npm", "1.0.0-rc.1"))
        assert not universal_spec(Ecosystem.PYPI).matches(parse_version("pypi", "1.0a1"))
