"""Manifest, lockfile, and rpm primary-metadata parsing."""

import json

import pytest

from pkgdash.errors import ParseError, SchemaError, UnsupportedLockVersion
from pkgdash.manifests import (
    DependencyKind,
    parse_lockfile,
    parse_manifest,
    parse_rpm_primary,
)
from pkgdash.version_specs import parse_version_spec
from pkgdash.versions import Ecosystem, parse_version

NPM_MINIMAL = b'{"name":"a","version":"1.0.0"}'

NPM_FULL = json.dumps({
    "name": "web-app",
    "version": "2.1.0",
    "description": "A demo web application",
    "license": "MIT",
    "repository": {"type": "git", "url": "git+https://forge.example/org/web-app.git"},
    "dependencies": {"lodash": "^4.17.0", "left-pad": "~1.3.0"},
    "devDependencies": {"jest-like": "29.0.0"},
    "optionalDependencies": {"fsevents-like": "*"},
    "scripts": {"test": "noise, ignored"},
}).encode()

# Expected entries mirror the native metadata dump for this manifest:
# serde ^1.0.100 runtime, itoa ^1.0 optional, ryu ~1.0.5 runtime,
# quickcheck ^0.9 dev.
CARGO_MANIFEST = b"""
[package]
name = "fixture-app"
version = "0.3.1"
description = "A fixture application"
license = "MIT"
repository = "https://forge.example/org/fixture-app"

[dependencies]
serde = "1.0.100"
itoa = { version = "^1.0", optional = true }
ryu = "~1.0.5"

[dev-dependencies]
quickcheck = "0.9"
"""

PYPROJECT = b"""
[project]
name = "Demo_Service"
version = "0.9.0"
description = "A demo service"
license = {text = "Apache-2.0"}
dependencies = [
    "requests>=2.20,<3",
    "click>=8 ; python_version > '3.7'",
]

[project.optional-dependencies]
dev = ["pytest-like>=7"]
extras = ["orjson-like"]

[project.urls]
Repository = "https://forge.example/org/demo-service"
"""

NPM_LOCK_V3 = json.dumps({
    "name": "web-app",
    "version": "2.1.0",
    "lockfileVersion": 3,
    "packages": {
        "": {"name": "web-app", "version": "2.1.0",
             "dependencies": {"aa": "^1.0.0", "bb": "^2.0.0"}},
        "node_modules/aa": {"version": "1.2.0", "integrity": "sha512-aaa"},
        "node_modules/bb": {"version": "2.5.0", "integrity": "sha512-bbb"},
        "node_modules/cc": {"version": "3.0.0"},
        "node_modules/bb/node_modules/dd": {"version": "4.1.0"},
        "node_modules/ee": {"version": "0.1.0"},
    },
}).encode()

PYPI_LOCK = b"""# project: demo-service==0.9.0
# pinned by the analyzer
requests-like==2.31.0 --hash=sha256:deadbeef
urllib3-like==2.0.4
"""

CARGO_LOCK_V3 = b"""
version = 3

[[package]]
name = "fixture-app"
version = "0.3.1"
dependencies = ["serde"]

[[package]]
name = "serde"
version = "1.0.188"
source = "registry+https://crates.example/index"
checksum = "abc123"
dependencies = ["serde_derive"]

[[package]]
name = "serde_derive"
version = "1.0.188"
source = "registry+https://crates.example/index"
checksum = "def456"
"""

RPM_PRIMARY = b"""<?xml version="1.0" encoding="UTF-8"?>
<metadata xmlns="http://linux.duke.edu/metadata/common"
          xmlns:rpm="http://linux.duke.edu/metadata/rpm" packages="2">
  <package type="rpm">
    <name>app-tool</name>
    <version epoch="0" ver="2.4" rel="1.fc40"/>
    <summary>A capability-consuming tool</summary>
    <url>https://forge.example/org/app-tool</url>
    <checksum type="sha256" pkgid="YES">1111aaaa</checksum>
    <format>
      <rpm:license>GPL-2.0-only</rpm:license>
      <rpm:provides>
        <rpm:entry name="app-tool" flags="EQ" epoch="0" ver="2.4" rel="1.fc40"/>
      </rpm:provides>
      <rpm:requires>
        <rpm:entry name="libwidget" flags="GE" ver="1.0"/>
      </rpm:requires>
    </format>
  </package>
  <package type="rpm">
    <name>widget-lib</name>
    <version epoch="0" ver="1.2" rel="3.fc40"/>
    <summary>Widget library</summary>
    <checksum type="sha256" pkgid="YES">2222bbbb</checksum>
    <format>
      <rpm:license>MIT</rpm:license>
      <rpm:provides>
        <rpm:entry name="widget-lib" flags="EQ" epoch="0" ver="1.2" rel="3.fc40"/>
        <rpm:entry name="libwidget" flags="EQ" ver="1.2"/>
      </rpm:provides>
    </format>
  </package>
</metadata>
"""


class TestParseManifest:
    def test_npm_minimal_document(self):
        doc = parse_manifest("npm", NPM_MINIMAL)
        assert doc.coordinate.name == "a"
        assert doc.coordinate.version == parse_version("npm", "1.0.0")
        assert doc.dependencies == []
        assert doc.description is None

    def test_npm_full_document(self):
        doc = parse_manifest("npm", NPM_FULL)
        assert doc.declared_license == "MIT"
        assert doc.declared_repo_url == "git+https://forge.example/org/web-app.git"
        kinds = {(d.name, d.kind) for d in doc.dependencies}
        assert kinds == {
            ("lodash", DependencyKind.RUNTIME),
            ("left-pad", DependencyKind.RUNTIME),
            ("jest-like", DependencyKind.DEV),
            ("fsevents-like", DependencyKind.OPTIONAL),
        }

    def test_cargo_kinds_match_native_dump(self):
        doc = parse_manifest("cargo", CARGO_MANIFEST)
        got = sorted((d.name, d.spec.text, d.kind.value) for d in doc.dependencies)
        assert got == [
            ("itoa", "^1.0", "optional"),
            ("quickcheck", "0.9", "dev"),
            ("ryu", "~1.0.5", "runtime"),
            ("serde", "1.0.100", "runtime"),
        ]
        assert len(doc.dependencies) == 4
        # bare cargo requirement means caret semantics
        serde = next(d for d in doc.dependencies if d.name == "serde")
        assert serde.spec.matches(parse_version("cargo", "1.0.188"))
        assert not serde.spec.matches(parse_version("cargo", "2.0.0"))

    def test_pypi_manifest(self):
        doc = parse_manifest("pypi", PYPROJECT)
        assert doc.coordinate.name == "demo-service"
        assert doc.declared_license == "Apache-2.0"
        assert doc.declared_repo_url == "https://forge.example/org/demo-service"
        by_name = {d.name: d for d in doc.dependencies}
        assert by_name["requests"].kind == DependencyKind.RUNTIME
        assert by_name["click"].kind == DependencyKind.RUNTIME  # marker opaque
        assert by_name["pytest-like"].kind == DependencyKind.DEV
        assert by_name["orjson-like"].kind == DependencyKind.OPTIONAL
        assert by_name["requests"].spec.matches(parse_version("pypi", "2.25"))

    def test_truncated_content_is_parse_error(self):
        with pytest.raises(ParseError):
            parse_manifest("npm", b'{"name": "a", ')
        with pytest.raises(ParseError):
            parse_manifest("cargo", b"\x00\x01binary")
        with pytest.raises(ParseError):
            parse_manifest("pypi", b"[project\nname=")

    def test_missing_name_is_schema_error(self):
        with pytest.raises(SchemaError):
            parse_manifest("npm", b'{"version": "1.0.0"}')
        with pytest.raises(SchemaError):
            parse_manifest("cargo", b"[package]\nversion = '1.0.0'\n")

    def test_unknown_fields_ignored(self):
        doc = parse_manifest("npm", b'{"name":"a","version":"1.0.0","weird":{"x":1}}')
        assert doc.coordinate.name == "a"

    def test_duplicate_name_kind_pairs_collapse(self):
        body = json.dumps({
            "name": "a", "version": "1.0.0",
            "dependencies": {"x": "^1.0.0"},
            "devDependencies": {"x": "^1.0.0"},
        }).encode()
        doc = parse_manifest("npm", body)
        assert len(doc.dependencies) == 2  # distinct kinds survive
        assert {d.kind for d in doc.dependencies} == {DependencyKind.RUNTIME, DependencyKind.DEV}


class TestParseLockfile:
    def test_npm_v3_lock_pins(self):
        lock = parse_lockfile("npm", NPM_LOCK_V3)
        assert lock.root.name == "web-app"
        assert len(lock.pins) == 5
        names = sorted(p.coordinate.name for p in lock.pins)
        assert names == ["aa", "bb", "cc", "dd", "ee"]
        for pin in lock.pins:
            assert pin.coordinate.version is not None
        dd = next(p for p in lock.pins if p.coordinate.name == "dd")
        assert dd.parent.name == "bb"
        aa = next(p for p in lock.pins if p.coordinate.name == "aa")
        assert aa.parent == lock.root
        assert aa.artifact_digest == "sha512-aaa"

    def test_npm_lock_parents_closed(self):
        lock = parse_lockfile("npm", NPM_LOCK_V3)
        known = {p.coordinate for p in lock.pins} | {lock.root}
        for pin in lock.pins:
            if pin.parent is not None:
                assert pin.parent in known

    def test_npm_v1_rejected(self):
        body = json.dumps({"name": "a", "version": "1.0.0",
                           "lockfileVersion": 1, "dependencies": {}}).encode()
        with pytest.raises(UnsupportedLockVersion):
            parse_lockfile("npm", body)

    def test_pypi_lock(self):
        lock = parse_lockfile("pypi", PYPI_LOCK)
        assert lock.root.name == "demo-service"
        assert len(lock.pins) == 2
        pin = next(p for p in lock.pins if p.coordinate.name == "requests-like")
        assert pin.coordinate.version == parse_version("pypi", "2.31.0")
        assert pin.artifact_digest == "deadbeef"
        assert pin.resolved_from_spec == parse_version_spec("pypi", "==2.31.0")

    def test_pypi_lock_requires_header(self):
        with pytest.raises(SchemaError):
            parse_lockfile("pypi", b"requests-like==2.31.0\n")

    def test_empty_lock_root_only(self):
        lock = parse_lockfile("pypi", b"# project: solo==1.0\n")
        assert lock.pins == []
        body = json.dumps({"name": "a", "version": "1.0.0",
                           "lockfileVersion": 3,
                           "packages": {"": {"name": "a", "version": "1.0.0"}}}).encode()
        assert parse_lockfile("npm", body).pins == []

    def test_cargo_lock(self):
        lock = parse_lockfile("cargo", CARGO_LOCK_V3)
        assert lock.root.name == "fixture-app"
        assert len(lock.pins) == 2
        serde = next(p for p in lock.pins if p.coordinate.name == "serde")
        assert serde.parent == lock.root
        assert serde.artifact_digest == "abc123"
        derive = next(p for p in lock.pins if p.coordinate.name == "serde_derive")
        assert derive.parent.name == "serde"

    def test_cargo_lock_version_gate(self):
        with pytest.raises(UnsupportedLockVersion):
            parse_lockfile("cargo", b"version = 2\n[[package]]\nname='a'\nversion='1.0.0'\n")

    def test_rpm_has_no_lock(self):
        with pytest.raises(UnsupportedLockVersion):
            parse_lockfile("rpm", b"")

    def test_every_pin_exact(self):
        for eco, body in (("npm", NPM_LOCK_V3), ("pypi", PYPI_LOCK), ("cargo", CARGO_LOCK_V3)):
            lock = parse_lockfile(eco, body)
            seen = set()
            for pin in lock.pins:
                assert pin.coordinate.version is not None
                key = (pin.coordinate.full_name, pin.coordinate.version.text)
                assert key not in seen
                seen.add(key)


class TestRpmPrimary:
    def test_capability_link(self):
        packages = parse_rpm_primary(RPM_PRIMARY)
        assert len(packages) == 2
        tool = next(p for p in packages if p.name == "app-tool")
        lib = next(p for p in packages if p.name == "widget-lib")
        assert tool.requires == (("libwidget", ">= 1.0"),)
        assert ("libwidget", "1.2") in lib.provides
        assert tool.evr == "2.4-1.fc40"
        assert tool.license == "GPL-2.0-only"
        assert tool.checksum == "1111aaaa"
        # the requirement resolves against the provider's capability
        spec = parse_version_spec("rpm", ">= 1.0")
        assert spec.matches(parse_version("rpm", "1.2"))

    def test_no_requires_is_empty(self):
        packages = parse_rpm_primary(RPM_PRIMARY)
        lib = next(p for p in packages if p.name == "widget-lib")
        assert lib.requires == ()

    def test_missing_name_is_parse_error(self):
        bad = RPM_PRIMARY.replace(b"<name>app-tool</name>", b"")
        with pytest.raises(ParseError):
            parse_rpm_primary(bad)

    def test_rpm_manifest_from_single_package_doc(self):
        doc = parse_manifest("rpm", RPM_PRIMARY)
        assert doc.coordinate.name == "app-tool"
        assert doc.dependencies[0].name == "libwidget"
        assert doc.dependencies[0].spec.text == ">= 1.0"

    def test_rich_dependency_rejected(self):
        bad = RPM_PRIMARY.replace(b'name="libwidget"', b'name="(libwidget or other)"')
        with pytest.raises(ParseError):
            parse_rpm_primary(bad)
