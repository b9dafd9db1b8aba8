"""Transitive dependency-graph construction against a registry snapshot.

Two strategies:

* ``duplicating`` — every requirement independently takes the highest
  satisfying version, so several versions of one name may coexist
  (npm-style trees). Each (name, version) pair is expanded once; cycles
  reuse the already-placed node.

* ``flat`` — at most one version per name. The search processes
  requirements in FIFO discovery order; for a new name it tries the
  highest version satisfying every requirement collected for that name
  so far, and on conflict backtracks chronologically: the most recent
  decision with untried candidates is advanced and the search replays
  from there. Each abandoned candidate counts one backtrack step against
  the policy bound.

Preference ties break toward the higher version, then the
lexicographically smaller package name (rpm capability providers).
Dev/optional requirement filtering: ``include_dev`` admits the root
manifest's dev dependencies; ``include_optional`` admits optional
dependencies at every level; runtime dependencies always resolve.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from pkgdash.errors import (
    BacktrackExhausted,
    DepthExceeded,
    MissingFromSnapshot,
    UnresolvableDependency,
)
from pkgdash.manifests import DependencyDecl, DependencyKind, LockDoc, LockPin, ManifestDoc
from pkgdash.purl import PackageCoordinate, normalize_name, parse_purl
from pkgdash.snapshot import RegistrySnapshot, SnapshotEntry
from pkgdash.version_specs import VersionSpec, parse_version_spec, spec_matches, universal_spec
from pkgdash.versions import Ecosystem


class Strategy:
    DUPLICATING = "duplicating"
    FLAT = "flat"


@dataclass(frozen=True)
class ResolutionPolicy:
    strategy: str = Strategy.FLAT
    include_dev: bool = False
    include_optional: bool = False
    max_depth: int | None = None
    strict_depth: bool = False
    backtrack_limit: int = 1000

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 when set")
        if self.strategy not in (Strategy.DUPLICATING, Strategy.FLAT):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class Edge:
    src: PackageCoordinate
    dst: PackageCoordinate
    spec: VersionSpec
    kind: DependencyKind


@dataclass(frozen=True)
class DependencyGraph:
    """Nodes are exact coordinates; every edge's requirement is satisfied."""

    root: PackageCoordinate
    nodes: frozenset[PackageCoordinate]
    edges: frozenset[Edge]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def validate(self) -> None:
        assert self.root in self.nodes, "root missing from nodes"
        for e in self.edges:
            assert e.src in self.nodes and e.dst in self.nodes, f"dangling edge {e}"
            assert e.dst.version is not None
            assert spec_matches(e.spec, e.dst.version), f"edge unsound: {e}"
        reached = {self.root}
        frontier = [self.root]
        out_edges: dict[PackageCoordinate, list[Edge]] = {}
        for e in self.edges:
            out_edges.setdefault(e.src, []).append(e)
        while frontier:
            cur = frontier.pop()
            for e in out_edges.get(cur, []):
                if e.dst not in reached:
                    reached.add(e.dst)
                    frontier.append(e.dst)
        assert reached == self.nodes, f"unreachable nodes: {self.nodes - reached}"

    def to_json(self) -> dict:
        nodes = sorted(self.nodes, key=lambda c: c.purl)
        return {
            "root": self.root.purl,
            "nodes": [c.purl for c in nodes],
            "edges": sorted(
                ({"from": e.src.purl, "to": e.dst.purl,
                  "spec": e.spec.text, "kind": e.kind.value}
                 for e in self.edges),
                key=lambda d: (d["from"], d["to"], d["kind"])),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DependencyGraph":
        root = parse_purl(doc["root"])
        nodes = frozenset(parse_purl(p) for p in doc["nodes"])
        eco = root.ecosystem
        edges = frozenset(
            Edge(parse_purl(e["from"]), parse_purl(e["to"]),
                 parse_version_spec(eco, e["spec"]), DependencyKind(e.get("kind", "runtime")))
            for e in doc["edges"])
        return cls(root=root, nodes=nodes, edges=edges)


def _root_requirements(root: ManifestDoc, policy: ResolutionPolicy) -> list[DependencyDecl]:
    out = []
    for dep in root.dependencies:
        if dep.kind is DependencyKind.DEV and not policy.include_dev:
            continue
        if dep.kind is DependencyKind.OPTIONAL and not policy.include_optional:
            continue
        out.append(dep)
    return out


def _child_requirements(entry: SnapshotEntry, policy: ResolutionPolicy) -> list[DependencyDecl]:
    out = []
    for dep in entry.dependencies:
        if dep.kind is DependencyKind.DEV:
            continue  # transitive dev deps never install
        if dep.kind is DependencyKind.OPTIONAL and not policy.include_optional:
            continue
        out.append(dep)
    return out


def _coord(eco: Ecosystem, name: str, entry: SnapshotEntry) -> PackageCoordinate:
    if eco is Ecosystem.NPM and name.startswith("@"):
        scope, _, bare = name.partition("/")
        return PackageCoordinate(eco, scope, bare, entry.version)
    return PackageCoordinate(eco, None, name, entry.version)


def _resolve_duplicating(root: ManifestDoc, snapshot: RegistrySnapshot,
                         policy: ResolutionPolicy) -> DependencyGraph:
    eco = snapshot.ecosystem
    root_coord = root.coordinate
    nodes: set[PackageCoordinate] = {root_coord}
    edges: set[Edge] = set()
    expanded: set[PackageCoordinate] = set()
    truncated = False

    # Worklist of (parent coordinate, requirement, depth, chain).
    work: list[tuple[PackageCoordinate, DependencyDecl, int, tuple[str, ...]]] = []
    for dep in _root_requirements(root, policy):
        work.append((root_coord, dep, 1, (f"{dep.name} {dep.spec.text}",)))
    while work:
        parent, decl, depth, chain = work.pop(0)
        if policy.max_depth is not None and depth > policy.max_depth:
            truncated = True
            continue
        cands = snapshot.candidates(decl.name, decl.spec)
        if not cands:
            raise UnresolvableDependency(
                f"no version of {decl.name!r} satisfies {decl.spec.text!r}",
                chain=[root_coord.purl, *chain])
        name, entry = cands[0]
        child = _coord(eco, name, entry)
        nodes.add(child)
        edges.add(Edge(parent, child, decl.spec, decl.kind))
        if child in expanded:
            continue
        expanded.add(child)
        for dep in _child_requirements(entry, policy):
            work.append((child, dep, depth + 1, chain + (f"{dep.name} {dep.spec.text}",)))
    if truncated and policy.strict_depth:
        raise DepthExceeded(f"resolution exceeded max_depth={policy.max_depth}")
    graph = DependencyGraph(root=root_coord, nodes=frozenset(nodes), edges=frozenset(edges))
    return graph


@dataclass
class _FlatState:
    assignment: dict  # canonical name -> (coordinate, entry)
    constraints: dict  # canonical name -> list[VersionSpec]
    queue: list  # (parent coordinate, DependencyDecl, depth, chain)
    edges: list

    def snapshot(self) -> "_FlatState":
        return _FlatState(
            assignment=dict(self.assignment),
            constraints={k: list(v) for k, v in self.constraints.items()},
            queue=list(self.queue),
            edges=list(self.edges),
        )


@dataclass
class _Decision:
    name: str
    candidates: list  # remaining untried (name, entry) pairs
    saved: _FlatState  # state as it was when the decision was made
    decl: DependencyDecl
    parent: PackageCoordinate
    depth: int
    chain: tuple


def _resolve_flat(root: ManifestDoc, snapshot: RegistrySnapshot,
                  policy: ResolutionPolicy) -> DependencyGraph:
    eco = snapshot.ecosystem
    root_coord = root.coordinate
    state = _FlatState(assignment={}, constraints={}, queue=[], edges=[])
    for dep in _root_requirements(root, policy):
        state.queue.append((root_coord, dep, 1, (f"{dep.name} {dep.spec.text}",)))
    stack: list[_Decision] = []
    steps = 0
    truncated = False
    last_conflict: tuple[str, ...] = ()

    def req_key(decl: DependencyDecl) -> str:
        if eco is Ecosystem.RPM:
            return decl.name  # capability; resolved package name may differ
        return normalize_name(eco, decl.name)

    while True:
        if not state.queue:
            break
        parent, decl, depth, chain = state.queue.pop(0)
        if policy.max_depth is not None and depth > policy.max_depth:
            truncated = True
            continue
        key = req_key(decl)
        state.constraints.setdefault(key, []).append(decl.spec)
        conflict = False
        if key in state.assignment:
            coord, _ = state.assignment[key]
            ok = (spec_matches(decl.spec, coord.version)
                  if eco is not Ecosystem.RPM else _rpm_still_satisfied(snapshot, decl, coord))
            if ok:
                state.edges.append(Edge(parent, coord, decl.spec, decl.kind))
                continue
            conflict = True
        else:
            cands = [c for c in snapshot.candidates(decl.name, decl.spec)
                     if all(_candidate_ok(snapshot, eco, decl.name, c, s)
                            for s in state.constraints[key])]
            if eco is Ecosystem.RPM:
                # one version per package name: drop providers pinned elsewhere
                # at a different version, reuse same-version assignments
                pkg_versions = {c.name: (c, e) for c, e in state.assignment.values()}
                usable = []
                reuse = None
                for name, entry in cands:
                    if name in pkg_versions:
                        coord, held = pkg_versions[name]
                        if coord.version == entry.version:
                            reuse = (coord, held)
                            break
                        continue
                    usable.append((name, entry))
                if reuse is not None:
                    state.assignment[key] = reuse
                    state.edges.append(Edge(parent, reuse[0], decl.spec, decl.kind))
                    continue
                cands = usable
            if cands:
                decision = _Decision(name=key, candidates=list(cands), saved=state.snapshot(),
                                     decl=decl, parent=parent, depth=depth, chain=chain)
                stack.append(decision)
                _apply_decision(state, decision, eco, policy)
                continue
            conflict = True
        if conflict:
            last_conflict = chain
            # chronological backtracking: advance the most recent decision
            # that still has untried candidates
            while stack and not stack[-1].candidates:
                stack.pop()
            if not stack:
                raise UnresolvableDependency(
                    f"no assignment satisfies {decl.name!r} {decl.spec.text!r}",
                    chain=[root_coord.purl, *chain])
            steps += 1
            if steps > policy.backtrack_limit:
                raise BacktrackExhausted(
                    f"gave up after {policy.backtrack_limit} backtrack steps",
                    conflicts=list(last_conflict))
            decision = stack[-1]
            state = decision.saved.snapshot()
            _apply_decision(state, decision, eco, policy)
    if truncated and policy.strict_depth:
        raise DepthExceeded(f"resolution exceeded max_depth={policy.max_depth}")
    nodes = {root_coord} | {coord for coord, _ in state.assignment.values()}
    graph = DependencyGraph(root=root_coord, nodes=frozenset(nodes),
                            edges=frozenset(state.edges))
    return graph


def _apply_decision(state: "_FlatState", decision: "_Decision",
                    eco: Ecosystem, policy: ResolutionPolicy) -> None:
    """Take the decision's next candidate and expand its requirements."""
    name, entry = decision.candidates.pop(0)
    child = _coord(eco, name, entry)
    state.assignment[decision.name] = (child, entry)
    state.edges.append(Edge(decision.parent, child, decision.decl.spec, decision.decl.kind))
    for dep in _child_requirements(entry, policy):
        state.queue.append((child, dep, decision.depth + 1,
                            decision.chain + (f"{dep.name} {dep.spec.text}",)))


def _candidate_ok(snapshot: RegistrySnapshot, eco: Ecosystem, raw_name: str,
                  cand: tuple[str, SnapshotEntry], spec: VersionSpec) -> bool:
    name, entry = cand
    if eco is Ecosystem.RPM:
        return any(n == name and e.version == entry.version
                   for n, e in snapshot.candidates(raw_name, spec))
    return spec_matches(spec, entry.version)


def _rpm_still_satisfied(snapshot: RegistrySnapshot, decl: DependencyDecl,
                         coord: PackageCoordinate) -> bool:
    return any(name == coord.name and entry.version == coord.version
               for name, entry in snapshot.candidates(decl.name, decl.spec))


def resolve(root: ManifestDoc, snapshot: RegistrySnapshot,
            policy: ResolutionPolicy | None = None) -> DependencyGraph:
    """Construct the transitive dependency graph for a manifest.

    Raises ``UnresolvableDependency`` (with the requirement chain) when no
    version can satisfy a requirement, ``BacktrackExhausted`` when the
    flat search runs out of its step budget, and ``DepthExceeded`` only
    when ``max_depth`` is set together with ``strict_depth``.
    """
    policy = policy or ResolutionPolicy()
    if root.coordinate.ecosystem != snapshot.ecosystem:
        raise MissingFromSnapshot(
            f"manifest is {root.coordinate.ecosystem.value}, "
            f"snapshot is {snapshot.ecosystem.value}")
    if policy.strategy == Strategy.DUPLICATING:
        graph = _resolve_duplicating(root, snapshot, policy)
    else:
        graph = _resolve_flat(root, snapshot, policy)
    graph.validate()
    return graph


def simulate_clean_install(root: ManifestDoc, snapshot: RegistrySnapshot,
                           policy: ResolutionPolicy | None = None) -> LockDoc:
    """Deterministically re-resolve and pin the resulting node set.

    Pins cover every non-root node; each records the requirement and
    parent of the first edge that introduced it.
    """
    policy = policy or ResolutionPolicy()
    graph = resolve(root, snapshot, policy)
    # Prefer the root's own declaration as the recorded parent so the
    # requirement survives a lock round trip.
    first_edge: dict[PackageCoordinate, Edge] = {}
    for e in sorted(graph.edges,
                    key=lambda e: (e.src != graph.root, e.src.purl, e.dst.purl)):
        first_edge.setdefault(e.dst, e)
    pins = []
    for node in sorted(graph.nodes - {graph.root}, key=lambda c: c.purl):
        edge = first_edge.get(node)
        entry = snapshot.entry(node.full_name, node.version)
        pins.append(LockPin(
            coordinate=node,
            resolved_from_spec=edge.spec if edge else None,
            parent=edge.src if edge else None,
            artifact_digest=entry.artifact_digest if entry else None,
        ))
    return LockDoc(root=graph.root, pins=pins)


def ingest_lock(lock: LockDoc, snapshot: RegistrySnapshot) -> DependencyGraph:
    """Rebuild a graph from exact pins plus snapshot dependency metadata.

    Pins failing a parent's declared requirement produce ``SpecViolation:``
    warnings on the returned graph rather than hard errors; the offending
    edges stay in the graph so callers can inspect them.
    """
    eco = snapshot.ecosystem
    nodes: set[PackageCoordinate] = {lock.root}
    warnings: list[str] = []
    by_key: dict[tuple[str, str], PackageCoordinate] = {}
    for pin in lock.pins:
        if not snapshot.has(pin.coordinate.full_name) and eco is not Ecosystem.RPM:
            raise MissingFromSnapshot(
                f"lock pin {pin.coordinate.purl} names a package absent from the snapshot")
        if eco is Ecosystem.RPM and not snapshot.entries(pin.coordinate.full_name):
            raise MissingFromSnapshot(
                f"lock pin {pin.coordinate.purl} names a package absent from the snapshot")
        nodes.add(pin.coordinate)
        by_key[(pin.coordinate.full_name, pin.coordinate.version.text)] = pin.coordinate

    def find_pinned(raw_name: str) -> list[PackageCoordinate]:
        if eco is Ecosystem.RPM:
            providers = {name for name, _, _ in snapshot.providers_of(raw_name)}
            return sorted((c for c in nodes - {lock.root} if c.name in providers),
                          key=lambda c: (c.version, _desc(c.name)), reverse=True)
        try:
            canonical = normalize_name(eco, raw_name)
        except Exception:
            return []
        return sorted((c for c in nodes - {lock.root} if c.full_name == canonical),
                      key=lambda c: c.version, reverse=True)

    edges: set[Edge] = set()
    for pin in lock.pins:
        if pin.parent is not None and pin.parent == lock.root:
            spec = pin.resolved_from_spec or universal_spec(eco)
            edges.add(Edge(lock.root, pin.coordinate, spec, DependencyKind.RUNTIME))
            if pin.resolved_from_spec is not None and \
                    not spec_matches(pin.resolved_from_spec, pin.coordinate.version):
                warnings.append(
                    f"SpecViolation: {pin.coordinate.purl} does not satisfy "
                    f"{pin.resolved_from_spec.text!r} declared by the root")
        entry = snapshot.entry(pin.coordinate.full_name, pin.coordinate.version)
        if entry is None:
            warnings.append(f"pin {pin.coordinate.purl} version is absent from the snapshot")
            continue
        for dep in entry.dependencies:
            if dep.kind is not DependencyKind.RUNTIME:
                continue
            targets = find_pinned(dep.name)
            if not targets:
                continue
            satisfying = [t for t in targets
                          if _lock_dep_satisfied(snapshot, eco, dep, t)]
            chosen = satisfying[0] if satisfying else targets[0]
            edges.add(Edge(pin.coordinate, chosen, dep.spec, dep.kind))
            if not satisfying:
                warnings.append(
                    f"SpecViolation: {chosen.purl} does not satisfy "
                    f"{dep.spec.text!r} declared by {pin.coordinate.purl}")
    return DependencyGraph(root=lock.root, nodes=frozenset(nodes),
                           edges=frozenset(edges), warnings=tuple(warnings))


def _lock_dep_satisfied(snapshot: RegistrySnapshot, eco: Ecosystem,
                        dep: DependencyDecl, target: PackageCoordinate) -> bool:
    if eco is Ecosystem.RPM:
        return any(name == target.name and entry.version == target.version
                   for name, entry in snapshot.candidates(dep.name, dep.spec))
    return spec_matches(dep.spec, target.version)


class _desc(str):
    def __lt__(self, other):
        return str.__gt__(self, other)

    def __gt__(self, other):
        return str.__lt__(self, other)


def dependents(target: PackageCoordinate,
               corpus: list[DependencyGraph]) -> set[PackageCoordinate]:
    """Roots of corpus graphs containing a node matching ``target``.

    Matching is by ecosystem and full name, and by version too when the
    target carries one.
    """
    out: set[PackageCoordinate] = set()
    for graph in corpus:
        for node in graph.nodes:
            if node.ecosystem != target.ecosystem:
                continue
            if node.full_name != target.full_name:
                continue
            if target.version is not None and node.version != target.version:
                continue
            out.add(graph.root)
            break
    return out
