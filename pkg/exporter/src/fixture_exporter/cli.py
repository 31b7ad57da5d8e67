"""Batch entry point: fixture-export --items items.jsonl --out-dir out/"""

import argparse
import sys
from pathlib import Path

from .backends import EMBEDDERS, PROPOSERS, SEGMENTERS
from .export import ExportError, ExportJob, load_items, run_export


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="fixture-export",
        description="Run proposer/segmenter/embedder models over an "
                    "image/question list and emit groundcheck fixture files.",
    )
    parser.add_argument("--items", required=True,
                        help="jsonl with instance_id, image, question per line")
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--proposer", choices=sorted(PROPOSERS), default="heuristic")
    parser.add_argument("--segmenter", choices=sorted(SEGMENTERS), default="threshold")
    parser.add_argument("--embedder", choices=sorted(EMBEDDERS), default="hashing")
    args = parser.parse_args(argv)

    try:
        job = ExportJob(
            items=load_items(args.items),
            output_dir=Path(args.out_dir),
            k=args.k,
            proposer=PROPOSERS[args.proposer](),
            segmenter=SEGMENTERS[args.segmenter](),
            embedder=EMBEDDERS[args.embedder](),
        )
        manifest = run_export(job)
    except (ExportError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    print(f"exported {manifest['instances_exported']} instances to {args.out_dir}")
    if manifest["instances_skipped"]:
        print(f"skipped (empty question): {manifest['instances_skipped']}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
