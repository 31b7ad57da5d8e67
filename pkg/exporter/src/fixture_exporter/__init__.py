"""Offline exporter producing groundcheck-format fixture files.

Runs the three provider-role models (answer proposer, grounding segmenter,
sentence embedder) over an image/question list and writes the dataset,
fixture-bundle, and embedding-table files the groundcheck pipeline
consumes. The exporter deliberately shares no code with groundcheck: the
file formats are the only contract between the two packages.
"""

from .export import ExportItem, ExportJob, run_export

__version__ = "0.1.0"

__all__ = ["ExportItem", "ExportJob", "run_export", "__version__"]
