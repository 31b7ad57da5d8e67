"""Command-line entry point: judge, evaluate, sweep, validate.

Judging and scoring are split so decision traces can be archived and
re-scored later. Exit codes are a stable contract: 0 success, 1 partial
per-instance failures (or validation violations), 2 input/usage failure.
Every flag can also be set through an environment variable named
GROUNDCHECK_<COMMAND>_<FLAG> (e.g. GROUNDCHECK_JUDGE_TAU_IOU).
"""

from __future__ import annotations

import concurrent.futures
import datetime
import hashlib
import json
import sys
from pathlib import Path

import click

from . import __version__
from .errors import GroundcheckError, NotFoundError
from .evaluation import EvalReport, SweepRow, evaluate, sweep_thresholds
from .providers import (
    EmbeddingTable,
    FixtureBundle,
    FixtureGroundingProvider,
    FixtureProposalProvider,
    TableEmbeddingProvider,
    decode_mask_entry,
    load_dataset,
)
from .reasoning import ReasoningConfig, run_pipeline
from .semantics import DEFAULT_JUNK_ANSWERS, filter_candidates, AnswerCandidate

_JSON_KW = {"sort_keys": True, "separators": (",", ":")}


def _read_junk_list(path: str | None) -> frozenset[str]:
    if path is None:
        return DEFAULT_JUNK_ANSWERS
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip() for line in lines if line.strip())


def _config_from_flags(tau_iou, tau_sem, k, junk_list, lenient_embeddings) -> ReasoningConfig:
    return ReasoningConfig(
        tau_iou=tau_iou,
        tau_sem=tau_sem,
        k=k,
        junk_list=_read_junk_list(junk_list),
        lenient_embeddings=lenient_embeddings,
    )


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _build_manifest(config: ReasoningConfig, inputs: dict[str, str]) -> dict:
    digests = {name: _sha256(p) for name, p in inputs.items()}
    # The id depends on content digests, config, and version only, so the
    # same data produces the same id wherever the files live.
    id_body = {
        "config": {
            "tau_iou": config.tau_iou,
            "tau_sem": config.tau_sem,
            "k": config.k,
            "junk_list": sorted(config.junk_list),
            "lenient_embeddings": config.lenient_embeddings,
        },
        "inputs": digests,
        "tool_version": __version__,
    }
    manifest_id = hashlib.sha256(json.dumps(id_body, **_JSON_KW).encode()).hexdigest()[:16]
    return {
        "manifest_id": manifest_id,
        "config": id_body["config"],
        "inputs": {
            name: {"path": str(p), "sha256": digests[name]} for name, p in inputs.items()
        },
        "tool_version": __version__,
    }


def _write_manifest_sidecar(out_path: Path, manifest: dict) -> None:
    # The timestamp lives only here; trace/report files stay byte-identical
    # across reruns and reference the manifest by id.
    sidecar = dict(manifest)
    sidecar["created_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    sidecar_path = out_path.with_suffix(out_path.suffix + ".manifest.json")
    sidecar_path.write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def _config_options(fn):
    opts = [
        click.option("--tau-iou", type=float, default=0.5, show_default=True,
                     help="Visual agreement threshold (inclusive)."),
        click.option("--tau-sem", type=float, default=0.7, show_default=True,
                     help="Semantic agreement threshold (strict)."),
        click.option("--k", type=int, default=3, show_default=True,
                     help="Candidate answers requested per instance."),
        click.option("--junk-list", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="File with one junk answer per line."),
        click.option("--lenient-embeddings", is_flag=True, default=False,
                     help="Fall back to deterministic toy embeddings for answers "
                          "missing from the table."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group(context_settings={"auto_envvar_prefix": "GROUNDCHECK"})
@click.version_option(version=__version__)
def main():
    """Decide whether a visual question's candidate answers share one
    image region, then score and sweep those decisions."""


# ----------------------------------------------------------------- judge --


@main.command()
@click.argument("dataset_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("fixtures_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("embeddings_path", type=click.Path(exists=True, dir_okay=False))
@_config_options
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Trace file (default: stdout). A .manifest.json sidecar is "
                   "written next to it.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Concurrent instances; output order is input order regardless.")
def judge(dataset_path, fixtures_path, embeddings_path, tau_iou, tau_sem, k,
          junk_list, lenient_embeddings, out, jobs):
    """Run the consistency pipeline on every instance, one trace record each."""
    try:
        config = _config_from_flags(tau_iou, tau_sem, k, junk_list, lenient_embeddings)
        dataset = load_dataset(dataset_path)
        bundle = FixtureBundle.load(fixtures_path)
        table = EmbeddingTable.load(embeddings_path)
    except (GroundcheckError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    manifest = _build_manifest(config, {
        "dataset": dataset_path, "fixtures": fixtures_path, "embeddings": embeddings_path,
    })
    proposal = FixtureProposalProvider(bundle, config.k)
    grounding = FixtureGroundingProvider(bundle)
    embedding = TableEmbeddingProvider(table, lenient=config.lenient_embeddings)
    providers = {"proposal": proposal.name, "grounding": grounding.name,
                 "embedding": embedding.name}

    def judge_one(instance):
        try:
            decision = run_pipeline(instance, proposal, grounding, embedding, config)
        except GroundcheckError as exc:
            return {"instance_id": instance.instance_id, "error": str(exc),
                    "manifest": manifest["manifest_id"]}
        record = {"instance_id": instance.instance_id,
                  "providers": providers,
                  "manifest": manifest["manifest_id"]}
        record.update(decision.to_dict())
        return record

    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(judge_one, dataset))
    else:
        records = [judge_one(inst) for inst in dataset]

    lines = [json.dumps(r, **_JSON_KW) for r in records]
    if out is None:
        for line in lines:
            click.echo(line)
    else:
        out_path = Path(out)
        out_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        _write_manifest_sidecar(out_path, manifest)

    errors = [r for r in records if "error" in r]
    for r in errors:
        click.echo(f"error: instance {r['instance_id']}: {r['error']}", err=True)
    click.echo(f"judged {len(records)} instances, {len(errors)} errors", err=True)
    sys.exit(1 if errors else 0)


# -------------------------------------------------------------- evaluate --


def _load_traces(path) -> tuple[dict[str, int], int]:
    """Read a trace file into {instance_id: s}; returns error-entry count."""
    decisions: dict[str, int] = {}
    errored = 0
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        record = json.loads(line)
        if "error" in record:
            errored += 1
            continue
        decisions[record["instance_id"]] = int(record["s"])
    return decisions, errored


def _render_report(report: EvalReport, errored: int) -> str:
    rows = [("overall", report)] + sorted(report.subsets.items())
    lines = [
        f"{'':10s} {'F1':>8s} {'Precision':>10s} {'Recall':>8s} "
        f"{'Pred.single':>12s} {'Act.single':>11s} {'Correct':>8s} {'Total':>6s}"
    ]
    for name, r in rows:
        lines.append(
            f"{name:10s} {_fmt(r.f1):>8s} {_fmt(r.precision):>10s} {_fmt(r.recall):>8s} "
            f"{r.predicted_single:>12d} {r.actual_single:>11d} "
            f"{r.correct_single:>8d} {r.total:>6d}"
        )
    lines.append(f"excluded: {report.excluded} unlabeled, {errored} errored")
    return "\n".join(lines)


@main.command("evaluate")
@click.argument("dataset_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("traces_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Machine-readable report file (JSON).")
def evaluate_cmd(dataset_path, traces_path, out):
    """Score archived traces against the dataset's gold labels."""
    try:
        dataset = load_dataset(dataset_path)
        decisions, errored = _load_traces(traces_path)
        report = evaluate(dataset, decisions)
    except (GroundcheckError, OSError, json.JSONDecodeError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    if report.total == 0:
        click.echo("error: nothing to evaluate (no decisions with gold labels)", err=True)
        sys.exit(2)

    click.echo(_render_report(report, errored))
    if out is not None:
        manifest = _build_manifest(ReasoningConfig(), {
            "dataset": dataset_path, "traces": traces_path,
        })
        payload = {"manifest": manifest["manifest_id"], "errored_traces": errored}
        payload.update(report.to_dict())
        out_path = Path(out)
        out_path.write_text(json.dumps(payload, **_JSON_KW) + "\n", encoding="utf-8")
        _write_manifest_sidecar(out_path, manifest)
    sys.exit(0)


# ----------------------------------------------------------------- sweep --


SWEEP_HEADER = "tau_iou,tau_sem,precision,recall,f1,predicted_single,actual_single,correct_single"


def _csv_cell(value) -> str:
    return "" if value is None else repr(value) if isinstance(value, float) else str(value)


def _sweep_csv(rows: list[SweepRow]) -> str:
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(",".join([
            _csv_cell(r.tau_iou), _csv_cell(r.tau_sem), _csv_cell(r.precision),
            _csv_cell(r.recall), _csv_cell(r.f1), str(r.predicted_single),
            str(r.actual_single), str(r.correct_single),
        ]))
    return "\n".join(lines) + "\n"


def _parse_grid(text: str, name: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"{name} must be comma-separated numbers, got {text!r}")
    if not values:
        raise click.BadParameter(f"{name} is empty")
    return values


@main.command()
@click.argument("dataset_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("fixtures_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("embeddings_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--tau-iou-grid", default="0.3,0.5,0.7", show_default=True,
              help="Comma-separated tau_iou values.")
@click.option("--tau-sem-grid", default="0.5,0.7,0.9", show_default=True,
              help="Comma-separated tau_sem values.")
@_config_options
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV file (default: stdout).")
def sweep(dataset_path, fixtures_path, embeddings_path, tau_iou_grid, tau_sem_grid,
          tau_iou, tau_sem, k, junk_list, lenient_embeddings, out):
    """Evaluate a threshold grid; rows are tau_iou-major and deterministic."""
    iou_grid = _parse_grid(tau_iou_grid, "--tau-iou-grid")
    sem_grid = _parse_grid(tau_sem_grid, "--tau-sem-grid")
    try:
        config = _config_from_flags(tau_iou, tau_sem, k, junk_list, lenient_embeddings)
        dataset = load_dataset(dataset_path)
        bundle = FixtureBundle.load(fixtures_path)
        table = EmbeddingTable.load(embeddings_path)
        providers = (
            FixtureProposalProvider(bundle, config.k),
            FixtureGroundingProvider(bundle),
            TableEmbeddingProvider(table, lenient=config.lenient_embeddings),
        )
        rows, best = sweep_thresholds(dataset, providers, iou_grid, sem_grid, config)
    except (GroundcheckError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    csv_text = _sweep_csv(rows)
    if out is None:
        click.echo(csv_text, nl=False)
    else:
        Path(out).write_text(csv_text, encoding="utf-8")
    if best is None:
        click.echo("best: none (no cell has a defined F1)", err=True)
    else:
        click.echo(
            f"best: tau_iou={best.tau_iou} tau_sem={best.tau_sem} f1={_fmt(best.f1)}",
            err=True,
        )
    sys.exit(0)


# -------------------------------------------------------------- validate --


@main.command()
@click.argument("dataset_path", type=click.Path(dir_okay=False))
@click.argument("fixtures_path", type=click.Path(dir_okay=False))
@click.argument("embeddings_path", type=click.Path(dir_okay=False))
@_config_options
def validate(dataset_path, fixtures_path, embeddings_path, tau_iou, tau_sem, k,
             junk_list, lenient_embeddings):
    """Check every schema invariant a judge run relies on.

    A triple passing validation completes `judge` (same flags) with zero
    per-instance errors.
    """
    try:
        config = _config_from_flags(tau_iou, tau_sem, k, junk_list, lenient_embeddings)
    except (GroundcheckError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    violations: list[str] = []

    dataset = None
    try:
        dataset = load_dataset(dataset_path)
    except (GroundcheckError, OSError) as exc:
        violations.append(f"dataset: {exc}")

    bundle = None
    try:
        bundle = FixtureBundle.load(fixtures_path)
    except (GroundcheckError, OSError) as exc:
        violations.append(f"fixtures: {exc}")

    table = None
    try:
        table = EmbeddingTable.load(embeddings_path)
    except (GroundcheckError, OSError) as exc:
        violations.append(f"embeddings: {exc}")

    if dataset is not None and bundle is not None:
        for inst in dataset:
            try:
                candidates = bundle.candidates(inst.instance_id)
            except NotFoundError:
                violations.append(f"fixtures: no entry for instance {inst.instance_id!r}")
                continue
            for index in range(len(candidates)):
                try:
                    entry = bundle.mask_entry(inst.instance_id, index)
                    decode_mask_entry(entry, inst.image_height, inst.image_width)
                except GroundcheckError as exc:
                    violations.append(
                        f"fixtures: instance {inst.instance_id!r} candidate {index}: {exc}"
                    )
            if table is not None and not config.lenient_embeddings:
                kept = filter_candidates(
                    [AnswerCandidate.from_raw(c) for c in candidates[: config.k]],
                    config.junk_list,
                )
                for cand in kept:
                    if cand.normalized not in table:
                        violations.append(
                            f"embeddings: instance {inst.instance_id!r}: no entry "
                            f"for {cand.normalized!r}"
                        )

    for v in violations:
        click.echo(f"violation: {v}")
    click.echo(f"{len(violations)} violations")
    sys.exit(0 if not violations else 1)


if __name__ == "__main__":
    main()
