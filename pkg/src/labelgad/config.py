"""Flat ``key = value`` pipeline configuration with typed fields."""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

from .benchmark import BenchmarkConfig
from .errors import ConfigError
from .gcn import TrainConfig
from .injection import InjectionConfig

LABEL_MODES = ("fraction", "pseudo")


@dataclass
class PipelineConfig:
    # paths
    edges: str = ""
    attributes: str = ""
    labels: str = ""
    truth: str = ""
    probs: str = ""
    scores: str = ""
    classes: str = ""  # full class labels, only for the entropy diagnostic
    out_dir: str = "out"
    # known class labels
    label_mode: str = "fraction"
    label_fraction: float = 0.3
    label_count: int = 0  # > 0 overrides label_fraction with an absolute count
    n_classes: int = 0  # 0 = infer from the label file
    pseudo_k: int = 5
    per_cluster: int = 50
    # injection
    clique_size: int = 15
    n_cliques: int = 5
    n_attribute_anomalies: int = 75
    candidate_pool: int = 50
    # synthetic benchmark
    n_nodes: int = 3000
    mean_degree: float = 6.0
    homophily: float = 0.9
    n_features: int = 64
    # classifier
    hidden_dim: int = 64
    learning_rate: float = 0.01
    weight_decay: float = 5e-4
    dropout_rate: float = 0.5
    max_epochs: int = 300
    patience: int = 30
    val_fraction: float = 0.05
    # scoring
    alpha: float | None = None
    sweep: bool = False
    metric: str = "jsd_plus"
    n_groups: int = 4
    seed: int = 0
    threads: int = 1

    @classmethod
    def load(cls, path=None, overrides: dict[str, str] | None = None) -> PipelineConfig:
        values: dict[str, str] = {}
        if path:
            values.update(parse_file(path))
        values.update(overrides or {})
        cfg = cls()
        for key, raw in values.items():
            cfg.set(key, raw)
        cfg.validate()
        return cfg

    def set(self, key: str, raw) -> None:
        types = {f.name: f.type for f in fields(self)}
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        setattr(self, key, _coerce(key, types[key], raw))

    def validate(self) -> None:
        if self.label_mode not in LABEL_MODES:
            raise ConfigError(f"label_mode must be one of {LABEL_MODES}, got {self.label_mode!r}")
        if not 0 < self.label_fraction <= 1:
            raise ConfigError("label_fraction must lie in (0, 1]")
        if self.alpha is not None and not 0 <= self.alpha <= 1:
            raise ConfigError("alpha must lie in [0, 1]")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        try:
            self.train_config(0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            hidden_dim=self.hidden_dim,
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            dropout_rate=self.dropout_rate,
            max_epochs=self.max_epochs,
            patience=self.patience,
            val_fraction=self.val_fraction,
            seed=seed,
        )

    def injection_config(self, seed: int) -> InjectionConfig:
        return InjectionConfig(
            clique_size=self.clique_size,
            n_cliques=self.n_cliques,
            n_attribute_anomalies=self.n_attribute_anomalies,
            candidate_pool=self.candidate_pool,
            seed=seed,
        )

    def benchmark_config(self, seed: int) -> BenchmarkConfig:
        return BenchmarkConfig(
            n_nodes=self.n_nodes,
            n_classes=self.n_classes or 5,
            mean_degree=self.mean_degree,
            homophily=self.homophily,
            n_features=self.n_features,
            seed=seed,
        )

    def dump(self) -> str:
        lines = []
        for k, v in dataclasses.asdict(self).items():
            lines.append(f"{k} = {'' if v is None else v}\n")
        return "".join(lines)


def _coerce(key: str, typ: str, raw):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if typ == "int":
            return int(raw)
        if typ == "float":
            return float(raw)
        if typ == "float | None":
            return None if raw in ("", "none", "None") else float(raw)
        if typ == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off", ""):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key} ({typ})") from None
    return raw


def parse_file(path) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def stage_seed(root: int, stage: str) -> int:
    """Seed for one pipeline stage, derived from the root seed and the stage name."""
    digest = hashlib.sha256(f"{root}:{stage}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1
