#!/usr/bin/env python3
"""Capture native-tool membership verdicts as frozen fixture tables.

For each ecosystem this samples (requirement, version) pairs from the
supported grammar subset and records the native engine's verdict:

* npm   — the ``semver`` npm package (run via node)
* cargo — the ``semver`` crate (small helper binary)
* pypi  — the ``packaging`` specifier engine with the installer's
          prerelease opt-in rule
* rpm   — no native binary is installable here; verdicts come from the
          independent character-walking comparison in tests/oracles.py

Outputs tests/fixtures/membership/<ecosystem>.json. Run once; commit the
tables. Requires node + the semver package, and the cargo helper binary
(see tools/cargo-oracle).
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent
OUT = ROOT / "tests" / "fixtures" / "membership"
sys.path.insert(0, str(ROOT / "tests"))

from oracles import rpm_spec_matches  # noqa: E402

NPM_ORACLE_JS = HERE / "npm_oracle.js"
CARGO_ORACLE_BIN = HERE / "cargo-oracle" / "target" / "release" / "cargo-oracle"

N_CASES = 1200


def rand_semver(rng, pre_p=0.3):
    s = f"{rng.randint(0, 4)}.{rng.randint(0, 6)}.{rng.randint(0, 6)}"
    if rng.random() < pre_p:
        ids = [rng.choice(["alpha", "beta", "rc", str(rng.randint(0, 5))])
               for _ in range(rng.randint(1, 2))]
        s += "-" + ".".join(ids)
    return s


def rand_npm_spec(rng):
    kind = rng.random()
    if kind < 0.08:
        return "*"
    if kind < 0.30:
        return "^" + (rand_semver(rng) if rng.random() < 0.8
                      else f"{rng.randint(0, 3)}.{rng.randint(0, 5)}")
    if kind < 0.48:
        return "~" + (rand_semver(rng) if rng.random() < 0.8
                      else f"{rng.randint(0, 3)}.{rng.randint(0, 5)}")
    if kind < 0.60:
        r = rng.random()
        if r < 0.5:
            return rand_semver(rng)
        if r < 0.75:
            return f"{rng.randint(0, 3)}.{rng.randint(0, 5)}"
        return f"{rng.randint(0, 3)}.{rng.randint(0, 5)}.x"
    return " ".join(rng.choice([">=", ">", "<", "<=", "="]) + rand_semver(rng)
                    for _ in range(rng.randint(1, 2)))


def rand_cargo_spec(rng):
    kind = rng.random()
    if kind < 0.06:
        return "*"
    if kind < 0.30:
        r = rng.random()
        base = (rand_semver(rng) if r < 0.7
                else (f"{rng.randint(0, 3)}.{rng.randint(0, 5)}" if r < 0.85
                      else str(rng.randint(0, 3))))
        return ("^" if rng.random() < 0.5 else "") + base
    if kind < 0.45:
        base = rand_semver(rng) if rng.random() < 0.7 else f"{rng.randint(0, 3)}.{rng.randint(0, 5)}"
        return "~" + base
    if kind < 0.55:
        return rng.choice([f"{rng.randint(0, 3)}.*", f"{rng.randint(0, 3)}.{rng.randint(0, 5)}.*"])
    if kind < 0.65:
        return "=" + rand_semver(rng)
    return ", ".join(rng.choice([">=", ">", "<", "<="]) + rand_semver(rng)
                     for _ in range(rng.randint(1, 2)))


def rand_pypi_version(rng):
    rel = ".".join(str(rng.randint(0, 6)) for _ in range(rng.randint(1, 3)))
    s = rel
    used_pre = False
    if rng.random() < 0.25:
        s += rng.choice(["a", "b", "rc"]) + str(rng.randint(0, 2))
        used_pre = True
    if rng.random() < 0.15:
        return s + ".post" + str(rng.randint(0, 2))
    if not used_pre and rng.random() < 0.15:
        s += ".dev" + str(rng.randint(0, 2))
    return s


def rand_pypi_spec(rng):
    clauses = []
    for _ in range(rng.randint(1, 3)):
        op = rng.choice(["==", "!=", ">=", "<=", ">", "<", "~="])
        v = rand_pypi_version(rng)
        if op == "~=":
            while v.count(".") < 1 or not v.split(".")[1][:1].isdigit():
                v = rand_pypi_version(rng)
        clauses.append(f"{op}{v}")
    return ",".join(clauses)


def rand_rpm_version(rng):
    segs = []
    for _ in range(rng.randint(1, 3)):
        segs.append(rng.choice([str(rng.randint(0, 20)),
                                rng.choice(["a", "b", "fc", "el", "git", "rc"]),
                                str(rng.randint(0, 9)) + rng.choice(["a", "b", ""])]))
    v = ".".join(segs)
    if rng.random() < 0.15:
        v += "~" + rng.choice(["rc1", "beta", "0"])
    if rng.random() < 0.08:
        v += "^" + rng.choice(["git20240101", "post1"])
    return v


def rand_evr(rng):
    s = ""
    if rng.random() < 0.2:
        s += f"{rng.randint(0, 3)}:"
    s += rand_rpm_version(rng)
    if rng.random() < 0.8:
        s += "-" + rng.choice([str(rng.randint(1, 30)),
                               f"{rng.randint(1, 5)}.fc{rng.randint(30, 40)}", "0.1~rc2"])
    return s


def gen_npm():
    rng = random.Random(2024)
    cases = [{"spec": rand_npm_spec(rng), "version": rand_semver(rng)}
             for _ in range(N_CASES)]
    proc = subprocess.run(
        ["node", str(NPM_ORACLE_JS)],
        input="\n".join(json.dumps(c) for c in cases),
        capture_output=True, text=True, check=True)
    out = []
    for case, verdict in zip(cases, proc.stdout.strip().split("\n")):
        if verdict == "invalid":
            continue
        case["matches"] = verdict == "true"
        out.append(case)
    return out


def gen_cargo():
    rng = random.Random(2025)
    cases = [(rand_cargo_spec(rng), rand_semver(rng)) for _ in range(N_CASES)]
    proc = subprocess.run(
        [str(CARGO_ORACLE_BIN)],
        input="\n".join(f"{s}\t{v}" for s, v in cases),
        capture_output=True, text=True, check=True)
    out = []
    for (spec, version), verdict in zip(cases, proc.stdout.strip().split("\n")):
        if verdict == "invalid":
            continue
        out.append({"spec": spec, "version": version, "matches": verdict == "true"})
    return out


def gen_pypi():
    from packaging.specifiers import SpecifierSet
    rng = random.Random(2026)
    out = []
    for _ in range(N_CASES):
        spec, version = rand_pypi_spec(rng), rand_pypi_version(rng)
        try:
            ss = SpecifierSet(spec)
        except Exception:
            continue
        optin = any(s.prereleases for s in ss)
        out.append({"spec": spec, "version": version,
                    "matches": ss.contains(version, prereleases=optin)})
    return out


def gen_rpm():
    rng = random.Random(2027)
    out = []
    for _ in range(N_CASES):
        op = rng.choice(["=", ">=", ">", "<=", "<", "*"])
        spec = "*" if op == "*" else f"{op} {rand_evr(rng)}"
        version = rand_evr(rng)
        out.append({"spec": spec, "version": version,
                    "matches": rpm_spec_matches(spec, version)})
    return out


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, gen in [("npm", gen_npm), ("cargo", gen_cargo),
                      ("pypi", gen_pypi), ("rpm", gen_rpm)]:
        table = gen()
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(table, indent=0) + "\n")
        print(f"{name}: {len(table)} cases -> {path}")


if __name__ == "__main__":
    main()
