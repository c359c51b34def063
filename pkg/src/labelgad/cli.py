"""Command-line entry point.

Every subcommand reads a flat ``key = value`` config (``--config``) whose keys
can be overridden with ``--set key=value`` or the dedicated flags. Stage
seeds derive from ``seed`` and the stage name, so one root seed fixes every
output file.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import io
from .benchmark import generate
from .config import PipelineConfig, stage_seed
from .errors import ConfigError, DataError, NumericError
from .evaluation import (
    ALPHA_GRID,
    ablation,
    alpha_sweep,
    degree_bias_report,
    entropy_threshold_scan,
    evaluate,
    neighborhood_label_entropies,
)
from .gcn import train
from .graph import AttributedGraph
from .injection import inject
from .labels import AnomalyGroundTruth, LabelSet
from .pipeline import known_labels
from .quantifiers import STRUCTURAL_METRICS, AnomalyScores, diagnostics_table, score_graph

log = logging.getLogger("labelgad")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextmanager
def stage(name: str):
    """Prefix any error raised inside the block with the stage name."""
    try:
        yield
    except (ConfigError, DataError, NumericError, ValueError, OSError, ArithmeticError) as exc:
        cls = type(exc) if isinstance(exc, (ConfigError, DataError, NumericError)) else (
            NumericError if isinstance(exc, ArithmeticError) else DataError
        )
        raise cls(f"[{name}] {exc}") from exc


# ---------------------------------------------------------------- helpers

def _require(cfg: PipelineConfig, *keys: str) -> None:
    missing = [k for k in keys if not getattr(cfg, k)]
    if missing:
        raise ConfigError("missing required setting(s): " + ", ".join(missing))


def _out(cfg: PipelineConfig, name: str) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _load_graph(cfg: PipelineConfig) -> AttributedGraph:
    _require(cfg, "edges", "attributes")
    for p in (cfg.edges, cfg.attributes):
        if not Path(p).is_file():
            raise DataError(f"no such file: {p}")
    return io.load_graph(cfg.edges, cfg.attributes)


def _load_label_pool(cfg: PipelineConfig) -> LabelSet:
    _require(cfg, "labels")
    n_classes = cfg.n_classes or io.infer_n_classes(cfg.labels)
    return io.load_labels(cfg.labels, n_classes)


def _load_truth(cfg: PipelineConfig, n_nodes: int) -> AnomalyGroundTruth | None:
    if not cfg.truth:
        return None
    return io.load_truth(cfg.truth, n_nodes)


def _load_probs(cfg: PipelineConfig, graph: AttributedGraph) -> np.ndarray:
    _require(cfg, "probs")
    P = io.read_matrix_csv(cfg.probs)
    if P.shape[0] != graph.n_nodes:
        raise DataError(f"{cfg.probs}: {P.shape[0]} rows for a graph of {graph.n_nodes} nodes")
    if (P < 0).any() or not np.allclose(P.sum(axis=1), 1.0, rtol=0, atol=1e-9):
        raise DataError(f"{cfg.probs}: rows are not probability distributions")
    return P


def _alpha(cfg: PipelineConfig) -> float:
    if cfg.alpha is None:
        raise ConfigError("alpha is required (--alpha or 'alpha = ...')")
    return cfg.alpha


def _write_scores(cfg: PipelineConfig, scores: AnomalyScores, P: np.ndarray, graph: AttributedGraph) -> list[Path]:
    paths = [_out(cfg, "scores.csv"), _out(cfg, "diagnostics.csv")]
    io.save_scores(scores, paths[0])
    diag = diagnostics_table(P, graph, cfg.threads)
    cols = list(diag)
    rows = ([i] + [diag[c][i] for c in cols] for i in range(graph.n_nodes))
    io.write_table(paths[1], ["node_id"] + cols, rows)
    return paths


def _write_report(cfg: PipelineConfig, scores: AnomalyScores, truth: AnomalyGroundTruth) -> list[Path]:
    report = evaluate(scores, truth, sweep=cfg.sweep)
    path = _out(cfg, "report.csv")
    io.write_table(
        path,
        ["metric", "value"],
        [
            ("auc_overall", report.auc_overall),
            ("auc_structural", report.auc_structural),
            ("auc_attribute", report.auc_attribute),
            ("alpha", None if np.isnan(scores.alpha) else scores.alpha),
        ],
    )
    paths = [path]
    if cfg.sweep:
        paths.append(_write_sweep(cfg, scores, truth))
    return paths


def _write_sweep(cfg: PipelineConfig, scores: AnomalyScores, truth: AnomalyGroundTruth) -> Path:
    sweep = alpha_sweep(scores.struc, scores.attr, truth, ALPHA_GRID)
    path = _out(cfg, "per_alpha.csv")
    io.write_table(
        path,
        ["alpha", "auc", "best"],
        [(a, auc, int(a == sweep.best_alpha)) for a, auc in sweep.per_alpha],
    )
    return path


# ---------------------------------------------------------------- commands

def cmd_generate(cfg: PipelineConfig) -> list[Path]:
    bench = generate(cfg.benchmark_config(stage_seed(cfg.seed, "generate")))
    paths = [_out(cfg, "graph.edges"), _out(cfg, "attributes.csv"), _out(cfg, "classes.csv")]
    io.save_graph(bench.graph, paths[0], paths[1])
    io.save_labels(bench.labels, paths[2])
    return paths


def cmd_inject(cfg: PipelineConfig) -> list[Path]:
    graph = _load_graph(cfg)
    with stage("inject"):
        injected, truth = inject(graph, cfg.injection_config(stage_seed(cfg.seed, "inject")))
    paths = [_out(cfg, "graph.edges"), _out(cfg, "attributes.csv"), _out(cfg, "truth.csv")]
    io.save_graph(injected, paths[0], paths[1])
    io.save_truth(truth, paths[2])
    return paths


def _select_labels(cfg: PipelineConfig, graph: AttributedGraph) -> LabelSet:
    pool = _load_label_pool(cfg) if cfg.label_mode == "fraction" else None
    with stage("label"):
        return known_labels(
            graph,
            cfg.label_mode,
            pool,
            cfg.label_fraction,
            cfg.label_count,
            cfg.pseudo_k,
            cfg.per_cluster,
            stage_seed(cfg.seed, "label"),
        )


def cmd_label(cfg: PipelineConfig) -> list[Path]:
    graph = _load_graph(cfg)
    labels = _select_labels(cfg, graph)
    path = _out(cfg, "labels.csv")
    io.save_labels(labels, path)
    return [path]


def _train(cfg: PipelineConfig, graph: AttributedGraph, labels: LabelSet) -> list[Path]:
    with stage("train"):
        fit = train(graph, labels, cfg.train_config(stage_seed(cfg.seed, "train")))
    paths = [_out(cfg, "model.txt"), _out(cfg, "probs.csv")]
    io.save_checkpoint({"W1": fit.model.W1, "W2": fit.model.W2}, paths[0])
    io.write_matrix_csv(fit.P, paths[1])
    return paths


def cmd_train(cfg: PipelineConfig) -> list[Path]:
    graph = _load_graph(cfg)
    return _train(cfg, graph, _load_label_pool(cfg))


def cmd_score(cfg: PipelineConfig) -> list[Path]:
    graph = _load_graph(cfg)
    P = _load_probs(cfg, graph)
    with stage("score"):
        scores = score_graph(P, graph, _alpha(cfg), cfg.metric, cfg.threads)
    return _write_scores(cfg, scores, P, graph)


def _load_scores_and_truth(cfg: PipelineConfig):
    _require(cfg, "scores", "truth")
    # the score file does not carry alpha; --alpha labels the report if given
    scores = io.load_scores(cfg.scores, np.nan if cfg.alpha is None else cfg.alpha)
    truth = io.load_truth(cfg.truth, len(scores.final))
    return scores, truth


def cmd_eval(cfg: PipelineConfig) -> list[Path]:
    scores, truth = _load_scores_and_truth(cfg)
    with stage("eval"):
        return _write_report(cfg, scores, truth)


def cmd_sweep(cfg: PipelineConfig) -> list[Path]:
    scores, truth = _load_scores_and_truth(cfg)
    with stage("sweep"):
        return [_write_sweep(cfg, scores, truth)]


def cmd_diagnose(cfg: PipelineConfig) -> list[Path]:
    graph = _load_graph(cfg)
    P = _load_probs(cfg, graph)
    paths = []
    diag = diagnostics_table(P, graph, cfg.threads)
    path = _out(cfg, "diagnostics.csv")
    io.write_table(path, ["node_id"] + list(diag), ([i] + [diag[c][i] for c in diag] for i in range(graph.n_nodes)))
    paths.append(path)
    truth = _load_truth(cfg, graph.n_nodes)
    if truth is None:
        log.warning("no ground truth given; only per-node diagnostics written")
        return paths

    with stage("diagnose"):
        bias = degree_bias_report(P, graph, truth, cfg.n_groups)
        path = _out(cfg, "degree_bias.csv")
        io.write_table(
            path,
            ["group", "degree_lo", "degree_hi", "n_anomalies", "n_benign"] + [f"gap_{m}" for m in STRUCTURAL_METRICS],
            (
                [g.index, g.degree_lo, g.degree_hi, g.n_anomalies, g.n_benign] + [g.gaps[m] for m in STRUCTURAL_METRICS]
                for g in bias.groups
            ),
        )
        paths.append(path)
        path = _out(cfg, "degree_bias_auc.csv")
        io.write_table(
            path,
            ["metric", "anomaly_group", "benign_group", "auc"],
            ([m, a, b, auc] for (m, a, b), auc in sorted(bias.cross_auc.items())),
        )
        paths.append(path)

        if cfg.alpha is not None:
            path = _out(cfg, "ablation.csv")
            abl = ablation(graph, P, truth, cfg.alpha)
            io.write_table(path, ["metric", "alpha", "auc"], ([m, cfg.alpha, auc] for m, auc in abl.items()))
            paths.append(path)

        if cfg.classes:
            full = io.load_labels(cfg.classes, cfg.n_classes or io.infer_n_classes(cfg.classes))
            classes = full.to_array(graph.n_nodes)
            ent = neighborhood_label_entropies(graph, classes)
            path = _out(cfg, "entropy_threshold.csv")
            io.write_table(
                path,
                ["threshold", "tp", "fn", "tn", "fp"],
                ([t, c.tp, c.fn, c.tn, c.fp] for t, c in entropy_threshold_scan(ent, truth)),
            )
            paths.append(path)
    return paths


def cmd_run(cfg: PipelineConfig) -> list[Path]:
    alpha = _alpha(cfg)
    graph = _load_graph(cfg)
    truth = _load_truth(cfg, graph.n_nodes)
    labels = _select_labels(cfg, graph)
    paths = [_out(cfg, "labels.csv")]
    io.save_labels(labels, paths[0])
    paths += _train(cfg, graph, labels)
    P = io.read_matrix_csv(paths[-1])
    with stage("score"):
        scores = score_graph(P, graph, alpha, cfg.metric, cfg.threads)
    paths += _write_scores(cfg, scores, P, graph)
    if truth is None:
        print("no ground truth given; evaluation skipped", file=sys.stderr)
    else:
        with stage("eval"):
            paths += _write_report(cfg, scores, truth)
    path = _out(cfg, "config.txt")
    path.write_text(cfg.dump())
    paths.append(path)
    return paths


COMMANDS = {
    "generate": (cmd_generate, "write a synthetic labeled benchmark graph"),
    "inject": (cmd_inject, "plant structural and attribute anomalies"),
    "label": (cmd_label, "select known class labels (sampled or pseudo)"),
    "train": (cmd_train, "train the GCN classifier on known labels"),
    "score": (cmd_score, "compute structural/attribute/final anomaly scores"),
    "eval": (cmd_eval, "ROC-AUC report for a score file"),
    "sweep": (cmd_sweep, "AUC over the alpha grid"),
    "diagnose": (cmd_diagnose, "per-node, degree-bias, ablation and entropy tables"),
    "run": (cmd_run, "label, train, score and evaluate in one go"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
    common.add_argument("--seed", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--threads", type=int)
    common.add_argument("--sweep", action="store_true", default=None, help="also sweep alpha over 0.0..1.0")
    for key in ("edges", "attributes", "labels", "truth", "probs", "scores", "classes"):
        common.add_argument(f"--{key}", metavar="PATH")
    common.add_argument("--out-dir", dest="out_dir", metavar="DIR")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="labelgad", description="Class-label-aware graph anomaly detection")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _config_from_args(args) -> PipelineConfig:
    overrides: dict[str, object] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip()] = v
    for key in ("seed", "alpha", "threads", "sweep", "edges", "attributes", "labels", "truth",
                "probs", "scores", "classes", "out_dir"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return PipelineConfig.load(args.config, overrides)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        func = COMMANDS[args.command][0]
        for path in func(cfg):
            print(path)
    except ConfigError as exc:
        print(f"labelgad {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"labelgad {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, ValueError, OSError) as exc:
        print(f"labelgad {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
