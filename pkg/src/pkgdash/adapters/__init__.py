"""Per-ecosystem manifest and lockfile parsers."""
