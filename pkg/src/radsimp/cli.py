"""Command-line entry point.

Subcommands: ``generate`` (produce the four simplification variants per
sentence), ``readability`` (score table), ``analyze`` (survey analytics),
``serve`` (run the survey HTTP service), ``plan`` (print the Latin-square
assignment), and ``validate`` (schema checks). Exit codes: 0 success,
2 configuration, 3 IO, 4 backend, 5 validation.
"""
from __future__ import annotations

import datetime as _dt
import functools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import __version__
from .analytics.report import build_report, load_export, write_plot_data
from .config import BACKEND_KINDS, RunConfig, load_run_config
from .corpus import (
    RadiologySentence,
    demo_corpus_path,
    demo_script_path,
    group_by_sentence,
    load_corpus,
    load_simplifications,
    save_simplifications,
    append_simplifications,
    verify_referential_integrity,
    ALL_VARIANTS,
)
from .errors import (
    AnalyticsError,
    BackendError,
    ConfigError,
    DataFormatError,
    RadsimpError,
    SurveyError,
    TemplateError,
)
from .llm import (
    CachingBackend,
    HttpChatBackend,
    LogicalClock,
    ModelParams,
    ScriptedBackend,
    TokenBucket,
    TranscriptStore,
    load_script_rules,
)
from .llm.messages import wall_clock
from .readability import render_score_table, score_table
from .simplify import (
    DEFAULT_TEMPLATES,
    LoopAborted,
    LoopConfig,
    generate_variant_set,
    load_template_file,
)
from .survey.store import StudyStore
from .survey.study import load_study_config

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_BACKEND = 4
EXIT_VALIDATION = 5


def handles_errors(fn):
    """Map package errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ConfigError as exc:
            _fail(EXIT_CONFIG, exc)
        except LoopAborted as exc:
            _fail(EXIT_BACKEND, exc)
        except BackendError as exc:
            _fail(EXIT_BACKEND, exc)
        except (DataFormatError, TemplateError, AnalyticsError, SurveyError) as exc:
            _fail(EXIT_VALIDATION, exc)
        except RadsimpError as exc:
            _fail(EXIT_VALIDATION, exc)
        except OSError as exc:
            _fail(EXIT_IO, exc)

    return wrapper


def _fail(code: int, exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _resolve_corpus(value: str) -> Path:
    return demo_corpus_path() if value == "demo" else Path(value)


def _utcnow() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


def _write_manifest(outdir: Path, command: str, outputs: list[str], **extra) -> Path:
    manifest = {
        "tool": "radsimp",
        "version": __version__,
        "command": command,
        "finished_at": _utcnow(),
        "outputs": outputs,
    } | extra
    path = outdir / "run_manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


@click.group()
@click.version_option(version=__version__, prog_name="radsimp")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Run config file (JSON).")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--workers", type=int, default=None, help="Parallel sentence sessions.")
@click.option("--backend", "backend_kind", type=click.Choice(BACKEND_KINDS), default=None,
              help="Chat backend to use.")
@click.pass_context
@handles_errors
def main(ctx, config_path, seed, workers, backend_kind):
    """Generate, score, administer, and analyze radiology sentence simplifications."""
    config = load_run_config(config_path)
    if seed is not None:
        config.seed = seed
    if workers is not None:
        config.worker_count = max(1, workers)
    if backend_kind is not None:
        config.backend = backend_kind
    ctx.obj = {"config": config, "config_path": config_path}


def _build_backend(config: RunConfig):
    if config.backend == "scripted":
        script = Path(config.script_path) if config.script_path else demo_script_path()
        return ScriptedBackend(rules=load_script_rules(script))
    live = HttpChatBackend(
        base_url=config.base_url,
        max_retries=config.max_retries,
        backoff_initial=config.backoff_initial,
        rate_limiter=TokenBucket(config.rate_limit_per_minute),
        response_path=config.response_path,
    )
    if config.backend == "cached":
        return CachingBackend(live, config.cache_dir)
    return live


def _model_params(config: RunConfig) -> ModelParams:
    return ModelParams(
        model_name=config.model_name,
        temperature=config.temperature,
        max_output_tokens=config.max_output_tokens,
        request_timeout=config.request_timeout,
        seed=config.seed,
    )


def _compact_existing(simp_path: Path, sentences: list[RadiologySentence]) -> dict:
    """Keep only complete variant groups; rewrite the file if anything is dropped."""
    if not simp_path.exists():
        return {}
    records = load_simplifications(simp_path, drop_partial_tail=True)
    verify_referential_integrity(records, sentences)
    grouped = group_by_sentence(records)
    complete = {
        sid: variants
        for sid, variants in grouped.items()
        if set(variants) == set(ALL_VARIANTS)
    }
    if len(complete) != len(grouped) or sum(map(len, grouped.values())) != len(records):
        kept = [
            record
            for sid in complete
            for record in (complete[sid][v] for v in ALL_VARIANTS)
        ]
        save_simplifications(kept, simp_path)
    return complete


@main.command()
@click.option("--corpus", "corpus_arg", required=True,
              help="Corpus file, or 'demo' for the bundled demo corpus.")
@click.option("--out", "outdir", type=click.Path(path_type=Path), required=True,
              help="Output directory (simplifications, transcripts, manifest).")
@click.option("--templates", "templates_path", type=click.Path(path_type=Path), default=None,
              help="Prompt template file overriding the shipped defaults.")
@click.option("--script", "script_path", type=click.Path(path_type=Path), default=None,
              help="Scripted-backend rules file (defaults to the bundled demo script).")
@click.pass_obj
@handles_errors
def generate(obj, corpus_arg, outdir, templates_path, script_path):
    """Produce the four simplification variants for every corpus sentence.

    Runs are resumable: sentences whose variant set is already complete in
    the output file are skipped without any backend calls.
    """
    config: RunConfig = obj["config"]
    if script_path is not None:
        config.script_path = str(script_path)
    if templates_path is not None:
        config.templates_path = str(templates_path)
    started = _utcnow()
    corpus_path = _resolve_corpus(corpus_arg)
    sentences = load_corpus(corpus_path)
    outdir.mkdir(parents=True, exist_ok=True)
    simp_path = outdir / "simplifications.jsonl"
    transcripts_path = outdir / "transcripts.jsonl"

    templates = (
        load_template_file(config.templates_path)
        if config.templates_path
        else DEFAULT_TEMPLATES
    )
    backend = _build_backend(config)
    loop_config = LoopConfig(
        params=_model_params(config),
        max_refine_rounds=config.max_refine_rounds,
        stop_prefix=config.stop_prefix,
    )
    clock_factory = LogicalClock if config.backend == "scripted" else (lambda: wall_clock)

    complete = _compact_existing(simp_path, sentences)
    todo = [s for s in sentences if s.id not in complete]
    store = TranscriptStore(transcripts_path)
    generated = 0

    def task(sentence):
        return generate_variant_set(
            sentence,
            backend,
            templates,
            loop_config,
            clock_factory,
            trim_cot=config.trim_cot,
        )

    try:
        with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
            futures = [(sentence, pool.submit(task, sentence)) for sentence in todo]
            try:
                for sentence, future in futures:
                    records, transcripts = future.result()
                    append_simplifications(records, simp_path)
                    for transcript in transcripts:
                        store.save(transcript)
                    generated += 1
            except LoopAborted as exc:
                for transcript in exc.transcripts:
                    store.save(transcript)
                pool.shutdown(cancel_futures=True)
                raise
    finally:
        _write_manifest(
            outdir,
            "generate",
            [simp_path.name, transcripts_path.name],
            config=str(obj["config_path"]) if obj["config_path"] else None,
            corpus=str(corpus_path),
            output_dir=str(outdir),
            backend=config.backend,
            seed=config.seed,
            started_at=started,
        )
    calls = getattr(backend, "calls", None)
    click.echo(
        f"generated {generated} sentence(s) ({generated * 4} records), "
        f"skipped {len(complete)} complete, backend calls: "
        f"{calls if calls is not None else 'n/a'}"
    )


@main.command()
@click.option("--corpus", "corpus_arg", required=True)
@click.option("--simplifications", "simp_path", type=click.Path(path_type=Path), required=True)
@click.option("--out", "outdir", type=click.Path(path_type=Path), default=None,
              help="Also write readability.json (and a manifest) here.")
@click.pass_obj
@handles_errors
def readability(obj, corpus_arg, simp_path, outdir):
    """Mean FKGL/GFI/ARI per variant, next to the original sentences."""
    corpus_path = _resolve_corpus(corpus_arg)
    sentences = load_corpus(corpus_path)
    records = load_simplifications(simp_path)
    verify_referential_integrity(records, sentences)
    table = score_table(sentences, records)
    click.echo(render_score_table(table))
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        json_path = outdir / "readability.json"
        json_path.write_text(json.dumps(table, indent=2) + "\n", encoding="utf-8")
        text_path = outdir / "readability.txt"
        text_path.write_text(render_score_table(table) + "\n", encoding="utf-8")
        _write_manifest(
            outdir,
            "readability",
            [json_path.name, text_path.name],
            corpus=str(corpus_path),
            simplifications=str(simp_path),
            output_dir=str(outdir),
        )


@main.command()
@click.option("--export", "export_path", type=click.Path(path_type=Path), default=None,
              help="Survey export file (NDJSON) from the service.")
@click.option("--lay-csv", "lay_csv", type=click.Path(path_type=Path), default=None,
              help="Layperson responses as CSV (alternative to --export).")
@click.option("--expert-csv", "expert_csv", type=click.Path(path_type=Path), default=None,
              help="Expert ratings as CSV (alternative to --export).")
@click.option("--corpus", "corpus_arg", default=None,
              help="Corpus with severity labels (overrides the export's; required for CSV input).")
@click.option("--simplifications", "simp_path", type=click.Path(path_type=Path), default=None,
              help="Embed the readability block for these records (needs --corpus).")
@click.option("--out", "outdir", type=click.Path(path_type=Path), required=True)
@click.pass_obj
@handles_errors
def analyze(obj, export_path, lay_csv, expert_csv, corpus_arg, simp_path, outdir):
    """Aggregate survey responses into the full analytics report."""
    from .analytics.csv_io import load_expert_csv, load_layperson_csv
    from .analytics.report import build_report_from_responses

    labels = None
    sentences = None
    if corpus_arg is not None:
        sentences = load_corpus(_resolve_corpus(corpus_arg))
        labels = {
            s.id: s.expert_severity for s in sentences if s.expert_severity is not None
        }
    if export_path is not None:
        export = load_export(export_path)
        report = build_report(export, labels)
        source = str(export_path)
    elif lay_csv is not None or expert_csv is not None:
        if labels is None:
            raise ConfigError("CSV input needs --corpus for the expert severity labels")
        responses = load_layperson_csv(lay_csv) if lay_csv else []
        ratings = load_expert_csv(expert_csv) if expert_csv else []
        report = build_report_from_responses("csv-import", responses, ratings, labels)
        source = ", ".join(str(p) for p in (lay_csv, expert_csv) if p)
    else:
        raise ConfigError("provide --export, or --lay-csv / --expert-csv")
    if simp_path is not None:
        if sentences is None:
            raise ConfigError("--simplifications needs --corpus for the original texts")
        records = load_simplifications(simp_path)
        verify_referential_integrity(records, sentences)
        report.readability = score_table(sentences, records)
    outdir.mkdir(parents=True, exist_ok=True)
    report_json = outdir / "report.json"
    report_json.write_text(
        json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    report_text = outdir / "report.txt"
    report_text.write_text(report.render_text() + "\n", encoding="utf-8")
    plot_paths = write_plot_data(report, outdir)
    _write_manifest(
        outdir,
        "analyze",
        [report_json.name, report_text.name] + [p.name for p in plot_paths],
        source=source,
        output_dir=str(outdir),
    )
    click.echo(report.render_text())


@main.command()
@click.argument("study_config", type=click.Path(path_type=Path))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--study-dir", "study_dir", type=click.Path(path_type=Path), default=None,
              help="Directory for event logs (default: the config file's directory).")
@click.option("--frontend", "frontend_dir", type=click.Path(path_type=Path), default=None,
              help="Built frontend directory to serve at /.")
@click.pass_obj
@handles_errors
def serve(obj, study_config, host, port, study_dir, frontend_dir):
    """Run the survey HTTP service until signaled."""
    import uvicorn

    from .survey.service import create_app

    config = load_study_config(study_config)
    store = StudyStore(study_dir or study_config.parent)
    runtime = store.load_study(study_config)
    if frontend_dir is None:
        candidate = Path("frontend/dist")
        frontend_dir = candidate if candidate.is_dir() else None
    app = create_app(store, frontend_dir=frontend_dir)
    click.echo(f"survey service for study {runtime.study_id!r} on http://{host}:{port}")
    click.echo(f"event log: {store.log_path(runtime.study_id)}")
    for rater in config.raters:
        click.echo(
            f"  {rater.role:<9} {rater.id}: "
            f"http://{host}:{port}/?study={config.study_id}&rater={rater.token}"
        )
    _write_manifest(
        store.study_dir,
        "serve",
        [store.log_path(runtime.study_id).name],
        study_config=str(study_config),
        seed=config.seed,
        bind=f"{host}:{port}",
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--corpus", "corpus_arg", required=True)
@click.option("--raters", "n_raters", type=int, default=8, show_default=True)
@click.pass_obj
@handles_errors
def plan(obj, corpus_arg, n_raters):
    """Print the Latin-square variant assignment for a rater count."""
    from .analytics.plan import latin_square_plan

    sentences = load_corpus(_resolve_corpus(corpus_arg))
    assignment = latin_square_plan(n_raters, [s.id for s in sentences], ALL_VARIANTS)
    click.echo("rater\tsentence\tvariant")
    for r in range(n_raters):
        for sentence in sentences:
            click.echo(f"{r}\t{sentence.id}\t{assignment[(r, sentence.id)].value}")


@main.command()
@click.argument("kind", type=click.Choice(["corpus", "simplifications", "study", "export"]))
@click.argument("path", type=click.Path(path_type=Path))
@click.option("--corpus", "corpus_arg", default=None,
              help="Corpus for referential checks (simplifications).")
@click.pass_obj
@handles_errors
def validate(obj, kind, path, corpus_arg):
    """Schema-check a data file; nonzero exit on the first violation."""
    if kind == "corpus":
        sentences = load_corpus(path)
        click.echo(f"ok: {len(sentences)} sentence(s)")
    elif kind == "simplifications":
        records = load_simplifications(path)
        if corpus_arg:
            verify_referential_integrity(records, load_corpus(_resolve_corpus(corpus_arg)))
        click.echo(f"ok: {len(records)} record(s)")
    elif kind == "study":
        from .survey.study import build_definition

        definition = build_definition(load_study_config(path))
        n_items = sum(
            len(definition.items_for(r.id)) for r in definition.config.raters
        )
        click.echo(
            f"ok: study {definition.config.study_id!r}, "
            f"{len(definition.sentences)} sentence(s), {n_items} item(s)"
        )
    else:
        export = load_export(path)
        click.echo(f"ok: export with {len(export.events)} event(s)")


if __name__ == "__main__":
    main()
