"""Access to the bundled 20-instance demo fixture.

The bundle covers all four decision branches and has hand-derived
verdicts; demos/make_demo_bundle.py documents its construction.
"""

from importlib import resources
from pathlib import Path


def demo_dir() -> Path:
    return Path(resources.files("groundcheck") / "data" / "demo")


def demo_paths() -> tuple[Path, Path, Path]:
    """(dataset, fixtures, embeddings) paths of the bundled demo."""
    base = demo_dir()
    return (
        base / "demo_dataset.jsonl",
        base / "demo_fixtures.jsonl",
        base / "demo_embeddings.jsonl",
    )
