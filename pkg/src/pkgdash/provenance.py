"""Upstream source-repository discovery and validation.

When a manifest does not name its repository, candidates are gathered
from the declared URL, the homepage, and an exact-name search over the
forge index, then scored on four evidence kinds:

    name match          0.30
    description overlap 0.15   (token Jaccard >= 0.5)
    version tag match   0.25
    file hash match     0.30   (>= 80% of release file digests in the tag tree)

The best candidate wins when its confidence reaches 0.5; a match counts
as validated only when tag or hash evidence backs it. Everything here is
offline against a forge-index fixture; a live forge client can implement
the same index interface.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import re
import tarfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit

logger = logging.getLogger(__name__)

WEIGHT_NAME = 0.30
WEIGHT_DESCRIPTION = 0.15
WEIGHT_VERSION_TAG = 0.25
WEIGHT_FILE_HASH = 0.30
ACCEPT_THRESHOLD = 0.5
DESCRIPTION_OVERLAP_MIN = 0.5
FILE_HASH_COVERAGE_MIN = 0.8


class Evidence(str, Enum):
    MANIFEST_FIELD = "manifest_field"
    HOMEPAGE_FIELD = "homepage_field"
    NAME_MATCH = "name_match"
    DESCRIPTION_MATCH = "description_match"
    VERSION_TAG_MATCH = "version_tag_match"
    FILE_HASH_MATCH = "file_hash_match"


_WEIGHTS = {
    Evidence.NAME_MATCH: WEIGHT_NAME,
    Evidence.DESCRIPTION_MATCH: WEIGHT_DESCRIPTION,
    Evidence.VERSION_TAG_MATCH: WEIGHT_VERSION_TAG,
    Evidence.FILE_HASH_MATCH: WEIGHT_FILE_HASH,
}


@dataclass(frozen=True)
class RepoMatch:
    repo_url: str
    confidence: float
    evidence: tuple[Evidence, ...]
    validated: bool

    def to_json(self) -> dict:
        return {
            "repo_url": self.repo_url,
            "confidence": self.confidence,
            "evidence": [e.value for e in self.evidence],
            "validated": self.validated,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RepoMatch":
        return cls(
            repo_url=doc["repo_url"],
            confidence=doc["confidence"],
            evidence=tuple(Evidence(e) for e in doc.get("evidence", [])),
            validated=doc.get("validated", False),
        )


@dataclass(frozen=True)
class ForgeRepo:
    url: str
    name: str
    description: str = ""
    tags: tuple[tuple[str, frozenset[str]], ...] = ()  # (tag name, sha256 set)


class ForgeIndex:
    """Searchable repository fixture; one JSON document per repository."""

    def __init__(self, repos: list[ForgeRepo] | None = None):
        self._repos = sorted(repos or [], key=lambda r: r.url)

    @classmethod
    def load(cls, directory: Path) -> "ForgeIndex":
        repos = []
        directory = Path(directory)
        if directory.is_dir():
            for path in sorted(directory.glob("*.json")):
                try:
                    doc = json.loads(path.read_text())
                except (OSError, json.JSONDecodeError) as exc:
                    logger.warning("skipping unreadable forge document %s: %s", path, exc)
                    continue
                tags = tuple(
                    (t["name"], frozenset(f["sha256"] for f in t.get("files", [])))
                    for t in doc.get("tags", []))
                repos.append(ForgeRepo(
                    url=doc["url"], name=doc.get("name", ""),
                    description=doc.get("description", ""), tags=tags))
        return cls(repos)

    def by_url(self, url: str) -> ForgeRepo | None:
        for repo in self._repos:
            if repo.url == url:
                return repo
        return None

    def by_name(self, name: str) -> list[ForgeRepo]:
        needle = name.lower()
        return [r for r in self._repos if r.name.lower() == needle]

    def all(self) -> list[ForgeRepo]:
        return list(self._repos)


def extract_repo_url(manifest) -> str | None:
    """Normalize a manifest's repository field, or None.

    Strips a ``git+`` scheme prefix and a trailing ``.git``, lowercases
    the host, and drops any fragment. Unparseable values degrade to None
    with a logged diagnostic.
    """
    raw = getattr(manifest, "declared_repo_url", None) or None
    if raw is None:
        return None
    return normalize_repo_url(raw)


def normalize_repo_url(raw: str) -> str | None:
    text = raw.strip()
    if text.startswith("git+"):
        text = text[4:]
    try:
        parts = urlsplit(text)
    except ValueError:
        logger.warning("unparseable repository URL %r", raw)
        return None
    if not parts.scheme or not parts.netloc:
        logger.warning("repository URL %r has no scheme or host", raw)
        return None
    path = parts.path
    if path.endswith(".git"):
        path = path[:-4]
    return urlunsplit((parts.scheme, parts.netloc.lower(), path, parts.query, ""))


def _tokens(text: str | None) -> frozenset[str]:
    return frozenset(re.findall(r"[a-z0-9]+", (text or "").lower()))


def _description_overlap(a: str | None, b: str | None) -> float:
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def archive_digests(payload: bytes) -> frozenset[str]:
    """SHA-256 of every regular file in a (possibly gzipped) tar archive."""
    digests = set()
    try:
        with tarfile.open(fileobj=io.BytesIO(payload), mode="r:*") as tar:
            for member in tar.getmembers():
                if not member.isfile():
                    continue
                handle = tar.extractfile(member)
                if handle is None:
                    continue
                digests.add(hashlib.sha256(handle.read()).hexdigest())
    except (tarfile.TarError, EOFError, OSError) as exc:
        logger.warning("release artifact is not a readable tar archive: %s", exc)
        return frozenset()
    return frozenset(digests)


def _tag_matches_version(tag: str, version_text: str) -> bool:
    return tag == version_text or tag == f"v{version_text}"


def _score_candidate(repo: ForgeRepo, package_name: str, version_text: str | None,
                     description: str | None, release_digests: frozenset[str],
                     origin: Evidence | None) -> RepoMatch:
    evidence: list[Evidence] = [origin] if origin else []
    score = 0.0
    if repo.name.lower() == package_name.lower():
        evidence.append(Evidence.NAME_MATCH)
        score += WEIGHT_NAME
    if _description_overlap(description, repo.description) >= DESCRIPTION_OVERLAP_MIN:
        evidence.append(Evidence.DESCRIPTION_MATCH)
        score += WEIGHT_DESCRIPTION
    matched_tag: frozenset[str] | None = None
    if version_text is not None:
        for tag, digests in repo.tags:
            if _tag_matches_version(tag, version_text):
                evidence.append(Evidence.VERSION_TAG_MATCH)
                score += WEIGHT_VERSION_TAG
                matched_tag = digests
                break
    if release_digests:
        trees = [matched_tag] if matched_tag is not None else [d for _, d in repo.tags]
        for tree in trees:
            covered = len(release_digests & tree) / len(release_digests)
            if covered >= FILE_HASH_COVERAGE_MIN:
                evidence.append(Evidence.FILE_HASH_MATCH)
                score += WEIGHT_FILE_HASH
                break
    validated = Evidence.FILE_HASH_MATCH in evidence or Evidence.VERSION_TAG_MATCH in evidence
    return RepoMatch(
        repo_url=repo.url,
        confidence=min(1.0, round(score, 6)),
        evidence=tuple(evidence),
        validated=validated,
    )


def discover_repo(package_name: str,
                  forge_index: ForgeIndex,
                  version_text: str | None = None,
                  declared_url: str | None = None,
                  homepage_url: str | None = None,
                  description: str | None = None,
                  release_artifact: bytes | None = None) -> RepoMatch | None:
    """Best-scoring repository candidate at confidence >= 0.5, else None.

    Deterministic: candidate ties break toward the lexicographically
    smallest URL. All failure modes degrade to None.
    """
    release_digests = archive_digests(release_artifact) if release_artifact else frozenset()
    candidates: dict[str, tuple[ForgeRepo, Evidence | None]] = {}

    def add(repo: ForgeRepo | None, origin: Evidence | None):
        if repo is not None and repo.url not in candidates:
            candidates[repo.url] = (repo, origin)

    if declared_url:
        normalized = normalize_repo_url(declared_url)
        if normalized:
            add(forge_index.by_url(normalized), Evidence.MANIFEST_FIELD)
    if homepage_url:
        normalized = normalize_repo_url(homepage_url)
        if normalized:
            add(forge_index.by_url(normalized), Evidence.HOMEPAGE_FIELD)
    for repo in forge_index.by_name(package_name):
        add(repo, None)

    scored = [
        _score_candidate(repo, package_name, version_text, description,
                         release_digests, origin)
        for repo, origin in candidates.values()
    ]
    acceptable = [m for m in scored if m.confidence >= ACCEPT_THRESHOLD]
    if not acceptable:
        return None
    acceptable.sort(key=lambda m: (-m.confidence, m.repo_url))
    return acceptable[0]
