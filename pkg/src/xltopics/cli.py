"""Pipeline orchestration and command line interface.

One run = load inputs -> refine dimensions -> cluster -> extract topic words
-> evaluate against a comparable corpus.  A single per-run seed drives every
randomized stage through fixed offsets (see derive_seed), so a report is a
pure function of (config, seed) and reruns are byte-identical.  Reports never
embed timestamps for the same reason.

Subcommands:
  run        full pipeline, writes topic_report.json/.md and eval_report.json
  benchmark  method x rank x seed sweep with aggregated metrics
  diagnose   per-dimension language t-statistics and histograms
  synth      write a synthetic bilingual benchmark to disk
  embed      fetch embeddings from a remote provider
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .cluster import (
    ClusterAssignment,
    adjusted_rand_index,
    cluster_language_balance,
    kmeans_fit,
)
from .evaluation import (
    EvalReport,
    TopicEvaluation,
    aggregate_runs,
    build_cooccurrence,
    evaluate_topics,
)
from .io import (
    FileFormatError,
    align_corpus_embeddings,
    load_comparable_pairs,
    load_corpus,
    load_embeddings,
    write_comparable_pairs,
    write_corpus,
    write_embeddings,
)
from .provider import ProviderConfig, ProviderError, fetch_embeddings
from .refine import (
    REFINE_METHODS,
    export_dimension_histograms,
    ldd_t_statistics,
    refine,
)
from .synth import SynthSpec, generate_synthetic
from .topics import (
    TopicTopWords,
    cluster_term_counts,
    ctfidf_scores,
    render_topics_markdown,
    top_words_per_language,
)
from .types import ComparableCorpus, Corpus, EmbeddingMatrix

# Stage seeds are derived from the per-run seed with fixed offsets so stages
# stay decorrelated while the whole run remains a function of one integer.
REFINE_SEED_OFFSET = 1
CLUSTER_SEED_OFFSET = 2
SYNTH_SEED_OFFSET = 3


def derive_seed(run_seed: int, offset: int) -> int:
    return run_seed * 1000 + offset


class PipelineError(RuntimeError):
    pass


@contextmanager
def _stage(name: str):
    """Prefix errors with the pipeline stage that raised them."""
    try:
        yield
    except PipelineError:
        raise
    except (ValueError, OSError, ProviderError) as exc:
        raise PipelineError(f"{name}: {exc}") from exc


@dataclass
class PipelineConfig:
    corpus: str | None = None
    embeddings: str | None = None
    provider_config: str | None = None
    synthetic: dict | None = None       # generator spec, see SynthSpec
    method: str = "usvd"
    rank: int = 100
    n_clusters: int = 50
    n_top: int = 15
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    comparable: str | None = None
    out: str = "out"

    def __post_init__(self):
        self.seeds = tuple(int(s) for s in self.seeds)
        if self.method not in REFINE_METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; expected one of {REFINE_METHODS}"
            )
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")
        if self.n_top < 1:
            raise ValueError("n_top must be >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.synthetic is not None:
            if self.corpus or self.embeddings or self.provider_config or self.comparable:
                raise ValueError(
                    "synthetic input cannot be combined with corpus, embeddings, "
                    "provider, or comparable paths"
                )
        else:
            if not self.corpus:
                raise ValueError("a corpus path is required unless synthetic input is used")
            if bool(self.embeddings) == bool(self.provider_config):
                raise ValueError(
                    "exactly one embedding source is required: "
                    "an embeddings file or a provider config"
                )

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict:
        # Echoed into every report; deliberately omits the output directory
        # so reports from different out dirs stay byte-comparable.
        return {
            "corpus": self.corpus,
            "embeddings": self.embeddings,
            "provider_config": self.provider_config,
            "synthetic": self.synthetic,
            "method": self.method,
            "rank": self.rank,
            "n_clusters": self.n_clusters,
            "n_top": self.n_top,
            "seeds": list(self.seeds),
            "comparable": self.comparable,
        }

    def eval_config(self) -> dict:
        """The settings that must match across runs before aggregation."""
        return {
            "method": self.method,
            "r": self.rank,
            "K": self.n_clusters,
            "N": self.n_top,
        }


@dataclass
class RunReport:
    config: dict
    seed: int
    n_documents: int
    languages: tuple[str, ...]
    assignment: ClusterAssignment
    topics: TopicTopWords
    evaluation: TopicEvaluation | None
    diagnostics: dict = field(default_factory=dict)
    removed_dim: int | None = None

    def topic_report_dict(self) -> dict:
        sizes = np.bincount(
            self.assignment.labels, minlength=self.assignment.n_clusters
        )
        return {
            "config": self.config,
            "seed": self.seed,
            "n_documents": self.n_documents,
            "languages": list(self.languages),
            "removed_dimension": self.removed_dim,
            "cluster_sizes": sizes.astype(int).tolist(),
            "inertia": float(self.assignment.inertia),
            "iterations_run": int(self.assignment.iterations_run),
            "diagnostics": self.diagnostics,
            "evaluation": (
                "skipped" if self.evaluation is None else self.evaluation.to_json_dict()
            ),
            "topics": self.topics.to_json_dict()["topics"],
        }


def _load_inputs(
    config: PipelineConfig, seed: int
) -> tuple[Corpus, EmbeddingMatrix, ComparableCorpus | None, np.ndarray | None]:
    """Resolve (corpus, embeddings, comparable pairs, planted topic labels)."""
    if config.synthetic is not None:
        with _stage("synth"):
            spec = SynthSpec(
                **{**config.synthetic, "seed": derive_seed(seed, SYNTH_SEED_OFFSET)}
            )
            corpus, emb, cc, truth = generate_synthetic(spec)
        return corpus, emb, cc, truth.topic

    with _stage("corpus"):
        corpus = load_corpus(config.corpus)
    if config.embeddings:
        with _stage("embeddings"):
            emb = load_embeddings(config.embeddings)
    else:
        with _stage("provider"):
            provider = _load_provider_config(config.provider_config)
            emb = fetch_embeddings(provider, corpus)
    with _stage("align"):
        corpus, emb = align_corpus_embeddings(corpus, emb)
    cc = None
    if config.comparable:
        with _stage("comparable"):
            cc = load_comparable_pairs(config.comparable, languages=corpus.bilingual_pair())
    return corpus, emb, cc, None


def _load_provider_config(path: str) -> ProviderConfig:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise ValueError(f"provider config {path} must be a JSON object")
    try:
        return ProviderConfig(**raw)
    except TypeError as exc:
        raise ValueError(f"provider config {path}: {exc}") from exc


def run_pipeline(config: PipelineConfig, seed: int) -> RunReport:
    """Execute one seeded end-to-end run.  Pure: no files are written."""
    corpus, emb, cc, planted = _load_inputs(config, seed)
    bilingual = len(corpus.languages) == 2
    labels = corpus.doc_languages() if bilingual else None

    with _stage("refine"):
        refined = refine(
            emb,
            method=config.method,
            r=config.rank,
            labels=labels,
            seed=derive_seed(seed, REFINE_SEED_OFFSET),
        )
    with _stage("cluster"):
        assignment = kmeans_fit(
            refined.data,
            n_clusters=config.n_clusters,
            seed=derive_seed(seed, CLUSTER_SEED_OFFSET),
        )
    with _stage("topics"):
        counts = cluster_term_counts(corpus, assignment)
        scores = ctfidf_scores(counts)
        top = top_words_per_language(scores, corpus, n_top=config.n_top)

    evaluation = None
    if cc is not None:
        with _stage("evaluate"):
            query = {lang: set().union(*top.word_sets(lang)) for lang in cc.languages}
            model = build_cooccurrence(cc, query)
            evaluation = evaluate_topics(top, model, seed=seed, config=config.eval_config())

    diagnostics: dict = {}
    if bilingual:
        with _stage("diagnostics"):
            entropy = cluster_language_balance(assignment, labels)
            diagnostics["mean_language_entropy"] = float(np.mean(entropy))
    if planted is not None:
        diagnostics["ari_vs_planted_topics"] = adjusted_rand_index(
            planted, assignment.labels
        )

    return RunReport(
        config=config.to_dict(),
        seed=seed,
        n_documents=corpus.n_documents,
        languages=corpus.languages,
        assignment=assignment,
        topics=top,
        evaluation=evaluation,
        diagnostics=diagnostics,
        removed_dim=refined.removed_dim,
    )


def _write_json(path: Path, obj) -> None:
    path.write_text(
        json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _topic_report_markdown(report: RunReport) -> str:
    lines = [
        "# Topic report",
        "",
        f"- method: {report.config['method']}",
        f"- rank: {report.config['rank']}",
        f"- clusters: {report.config['n_clusters']}",
        f"- seed: {report.seed}",
        f"- documents: {report.n_documents}",
    ]
    if report.evaluation is not None:
        lines.append(f"- cnpmi: {report.evaluation.cnpmi_mean:.4f}")
        lines.append(f"- diversity: {report.evaluation.diversity:.4f}")
        lines.append(f"- tq: {report.evaluation.tq:.4f}")
    else:
        lines.append("- evaluation: skipped (no comparable corpus)")
    lines.append("")
    lines.append(render_topics_markdown(report.topics))
    return "\n".join(lines)


def cmd_run(config: PipelineConfig) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = [run_pipeline(config, seed) for seed in config.seeds]

    first = reports[0]
    _write_json(out / "topic_report.json", first.topic_report_dict())
    (out / "topic_report.md").write_text(
        _topic_report_markdown(first) + "\n", encoding="utf-8"
    )

    evaluations = [r.evaluation for r in reports if r.evaluation is not None]
    if evaluations:
        eval_report = aggregate_runs(evaluations)
        payload = eval_report.to_json_dict()
        payload["diagnostics_per_seed"] = [
            {"seed": r.seed, **r.diagnostics} for r in reports
        ]
        _write_json(out / "eval_report.json", payload)
        agg = eval_report.aggregate
        print(
            f"cnpmi {agg['cnpmi']['mean']:.4f} "
            f"diversity {agg['diversity']['mean']:.4f} "
            f"tq {agg['tq']['mean']:.4f} over {len(evaluations)} seed(s)"
        )
    else:
        print("evaluation skipped: no comparable corpus configured")
    print(f"wrote {out / 'topic_report.json'}")
    return 0


def run_benchmark(
    config: PipelineConfig,
    methods: tuple[str, ...],
    ranks: tuple[int, ...],
) -> dict:
    """Sweep methods x ranks over the configured seeds and aggregate."""
    if not methods or not ranks or not config.seeds:
        raise PipelineError("benchmark: nothing to run (empty methods, ranks, or seeds)")
    if config.synthetic is None and not config.comparable:
        raise PipelineError(
            "benchmark: evaluation needs a comparable corpus or synthetic input"
        )
    for method in methods:
        if method not in REFINE_METHODS:
            raise PipelineError(
                f"benchmark: unknown method {method!r}; expected one of {REFINE_METHODS}"
            )

    cells = []
    for method in methods:
        for rank in ranks:
            cell_config = replace(config, method=method, rank=rank)
            runs = [run_pipeline(cell_config, seed) for seed in config.seeds]
            evaluations = [r.evaluation for r in runs if r.evaluation is not None]
            if not evaluations:
                raise PipelineError(
                    f"benchmark: no evaluation produced for method={method} rank={rank}"
                )
            report = aggregate_runs(evaluations)
            cells.append(
                {
                    "method": method,
                    "rank": rank,
                    "aggregate": report.aggregate,
                    "per_seed": [e.to_json_dict() for e in evaluations],
                }
            )
    return {"config": config.to_dict(), "cells": cells}


def _benchmark_markdown(result: dict) -> str:
    lines = [
        "# Benchmark",
        "",
        "| method | rank | CNPMI | Diversity | TQ |",
        "| --- | --- | --- | --- | --- |",
    ]
    for cell in result["cells"]:
        agg = cell["aggregate"]

        def fmt(name: str) -> str:
            return f"{agg[name]['mean']:.4f} ± {agg[name]['std']:.4f}"

        lines.append(
            f"| {cell['method']} | {cell['rank']} | "
            f"{fmt('cnpmi')} | {fmt('diversity')} | {fmt('tq')} |"
        )
    return "\n".join(lines) + "\n"


def cmd_benchmark(
    config: PipelineConfig, methods: tuple[str, ...], ranks: tuple[int, ...]
) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_benchmark(config, methods, ranks)
    _write_json(out / "benchmark.json", result)

    with (out / "benchmark.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "method",
                "rank",
                "cnpmi_mean",
                "cnpmi_std",
                "diversity_mean",
                "diversity_std",
                "tq_mean",
                "tq_std",
            ]
        )
        for cell in result["cells"]:
            agg = cell["aggregate"]
            writer.writerow(
                [
                    cell["method"],
                    cell["rank"],
                    f"{agg['cnpmi']['mean']:.6f}",
                    f"{agg['cnpmi']['std']:.6f}",
                    f"{agg['diversity']['mean']:.6f}",
                    f"{agg['diversity']['std']:.6f}",
                    f"{agg['tq']['mean']:.6f}",
                    f"{agg['tq']['std']:.6f}",
                ]
            )

    with (out / "rank_series.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "rank", "cnpmi_mean"])
        for cell in result["cells"]:
            writer.writerow(
                [
                    cell["method"],
                    cell["rank"],
                    f"{cell['aggregate']['cnpmi']['mean']:.6f}",
                ]
            )

    (out / "benchmark.md").write_text(_benchmark_markdown(result), encoding="utf-8")
    print(f"wrote {out / 'benchmark.csv'} ({len(result['cells'])} cells)")
    return 0


def cmd_diagnose(config: PipelineConfig, top_dims: int, bins: int) -> int:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = config.seeds[0]
    corpus, emb, _, _ = _load_inputs(config, seed)
    if len(corpus.languages) != 2:
        raise PipelineError(
            f"diagnose: needs a bilingual corpus, got languages {list(corpus.languages)}"
        )
    labels = corpus.doc_languages()
    with _stage("diagnose"):
        report = ldd_t_statistics(emb.data, labels)
        payload = export_dimension_histograms(
            emb.data, labels, top_n=top_dims, bins=bins
        )
    _write_json(out / "ldd_histograms.json", payload)
    shown = report.sorted_dims[:top_dims]
    for dim in shown:
        print(f"dim {int(dim)}: |t| = {report.abs_t[dim]:.2f}")
    print(f"wrote {out / 'ldd_histograms.json'}")
    return 0


def cmd_synth(spec_path: str | None, out_dir: str) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw = {}
    if spec_path is not None:
        raw = json.loads(Path(spec_path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise PipelineError(f"synth: spec {spec_path} must be a JSON object")
    with _stage("synth"):
        spec = SynthSpec(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in raw.items()})
        corpus, emb, cc, truth = generate_synthetic(spec)
    write_corpus(corpus, out / "corpus.jsonl")
    write_embeddings(emb, out / "embeddings.emb1")
    write_comparable_pairs(cc, out / "comparable_pairs.jsonl")
    _write_json(out / "truth.json", truth.to_json_dict())
    print(
        f"wrote {corpus.n_documents} documents, {emb.dim}-dim embeddings, "
        f"{cc.n_pairs} pairs to {out}"
    )
    return 0


def cmd_embed(corpus_path: str, provider_path: str, out_dir: str) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with _stage("corpus"):
        corpus = load_corpus(corpus_path)
    with _stage("provider"):
        provider = _load_provider_config(provider_path)
        emb = fetch_embeddings(provider, corpus)
    write_embeddings(emb, out / "embeddings.emb1")
    print(f"wrote {emb.n_rows} x {emb.dim} embeddings to {out / 'embeddings.emb1'}")
    return 0


def _parse_seeds(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise PipelineError(f"cli: bad --seeds value {text!r}: {exc}") from exc


def _parse_ranks(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise PipelineError(f"cli: bad --ranks value {text!r}: {exc}") from exc


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    raw: dict = {}
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(loaded, dict):
            raise PipelineError(f"cli: config {args.config} must be a JSON object")
        raw.update(loaded)
    overrides = {
        "corpus": getattr(args, "corpus", None),
        "embeddings": getattr(args, "embeddings", None),
        "provider_config": getattr(args, "provider_config", None),
        "method": getattr(args, "method", None),
        "rank": getattr(args, "rank", None),
        "n_clusters": getattr(args, "clusters", None),
        "n_top": getattr(args, "topn", None),
        "comparable": getattr(args, "comparable", None),
        "out": getattr(args, "out", None),
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    if getattr(args, "seeds", None):
        raw["seeds"] = _parse_seeds(args.seeds)
    if getattr(args, "synthetic", None):
        spec = json.loads(Path(args.synthetic).read_text(encoding="utf-8"))
        if not isinstance(spec, dict):
            raise PipelineError(f"cli: synthetic spec {args.synthetic} must be a JSON object")
        raw["synthetic"] = spec
    if isinstance(raw.get("seeds"), list):
        raw["seeds"] = tuple(raw["seeds"])
    try:
        return PipelineConfig.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise PipelineError(f"cli: {exc}") from exc


def _add_pipeline_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--corpus", help="corpus JSONL path")
    parser.add_argument("--embeddings", help="embeddings file (binary or JSONL)")
    parser.add_argument("--provider-config", dest="provider_config",
                        help="JSON config for a remote embedding provider")
    parser.add_argument("--synthetic", help="JSON spec for synthetic input data")
    parser.add_argument("--method", choices=REFINE_METHODS,
                        help="dimension refinement method")
    parser.add_argument("--rank", type=int, help="refinement rank")
    parser.add_argument("--clusters", type=int, help="number of clusters")
    parser.add_argument("--topn", type=int, help="top words per topic and language")
    parser.add_argument("--seeds", help="comma separated run seeds, e.g. 1,2,3")
    parser.add_argument("--comparable", help="comparable pairs JSONL path")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xltopics",
        description="Cross-lingual clustering topic pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full pipeline")
    _add_pipeline_args(p_run)

    p_bench = sub.add_parser("benchmark", help="sweep methods and ranks")
    _add_pipeline_args(p_bench)
    p_bench.add_argument("--methods", default="oe,svd,usvd,svdlr",
                         help="comma separated methods to compare")
    p_bench.add_argument("--ranks", default=None,
                         help="comma separated ranks (default: the configured rank)")

    p_diag = sub.add_parser("diagnose", help="report language-dependent dimensions")
    _add_pipeline_args(p_diag)
    p_diag.add_argument("--dims", type=int, default=3,
                        help="number of top dimensions to export")
    p_diag.add_argument("--bins", type=int, default=50, help="histogram bins")

    p_synth = sub.add_parser("synth", help="generate a synthetic benchmark")
    p_synth.add_argument("--spec", help="JSON generator spec (defaults used if omitted)")
    p_synth.add_argument("--out", default="out", help="output directory")

    p_embed = sub.add_parser("embed", help="fetch embeddings from a provider")
    p_embed.add_argument("--corpus", required=True, help="corpus JSONL path")
    p_embed.add_argument("--provider-config", dest="provider_config", required=True,
                         help="JSON provider config")
    p_embed.add_argument("--out", default="out", help="output directory")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(_config_from_args(args))
        if args.command == "benchmark":
            config = _config_from_args(args)
            methods = tuple(m for m in args.methods.split(",") if m.strip())
            ranks = _parse_ranks(args.ranks) if args.ranks else (config.rank,)
            return cmd_benchmark(config, methods, ranks)
        if args.command == "diagnose":
            return cmd_diagnose(_config_from_args(args), args.dims, args.bins)
        if args.command == "synth":
            return cmd_synth(args.spec, args.out)
        if args.command == "embed":
            return cmd_embed(args.corpus, args.provider_config, args.out)
        parser.error(f"unknown command {args.command!r}")
    except (PipelineError, FileFormatError, ProviderError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
