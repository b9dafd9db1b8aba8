"""Cross-ecosystem package analysis platform.

Resolves transitive dependency graphs from manifests and lockfiles,
enriches packages with vulnerability and license findings, computes
upstream community-health metrics, and serves the harmonized model
over an HTTP API and a CLI.
"""

__version__ = "0.1.0"
