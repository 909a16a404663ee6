"""Engine configuration: dotted-key text files with validated defaults.

Format, one assignment per line::

    # comment
    paths.graph = bundle/graph.txt
    reasoning.tau = 0.0

Relative paths are resolved against the config file's own directory.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from pathlib import Path

log = logging.getLogger(__name__)

MODE_CHOICES = ("baseline", "hierarchical")


@dataclass
class EngineConfig:
    graph_path: str | None = None
    word_vectors_path: str | None = None
    aliases_path: str | None = None
    templates_path: str | None = None
    stopwords_path: str | None = None
    pos_lexicon_path: str | None = None
    parameters_path: str | None = None
    movie_map_path: str | None = None
    category_predicate: str = "has_genre"
    dim: int = 64
    layers: int = 2
    activation: str = "relu"
    tau: float = 0.0
    decay: float = 0.5  # context-encoder memory
    portrait_decay: float = 1.0  # reserved for decayed score accumulation
    k: int = 2
    cap_middle: int = 1
    cap_leaf: int = 2
    mode: str = "hierarchical"
    seed: int = 0
    session_timeout_minutes: float = 30.0

    def validate(self) -> "EngineConfig":
        if self.dim < 1:
            raise ValueError(f"embedding.dim must be >= 1, got {self.dim}")
        if self.layers < 1:
            raise ValueError(f"rgcn.layers must be >= 1, got {self.layers}")
        if self.activation not in ("relu", "sigmoid"):
            raise ValueError(f"rgcn.activation must be relu or sigmoid, got {self.activation!r}")
        if not (0.0 < self.decay <= 1.0):
            raise ValueError(f"encoder.decay must be in (0, 1], got {self.decay}")
        if not (0.0 < self.portrait_decay <= 1.0):
            raise ValueError(f"portrait.decay must be in (0, 1], got {self.portrait_decay}")
        if self.k < 1:
            raise ValueError(f"portrait.k must be >= 1, got {self.k}")
        if self.cap_middle < 1 or self.cap_leaf < 1:
            raise ValueError("caps.middle and caps.leaf must be >= 1")
        if self.mode not in MODE_CHOICES:
            raise ValueError(f"mode must be one of {MODE_CHOICES}, got {self.mode!r}")
        if self.session_timeout_minutes <= 0:
            raise ValueError("service.session_timeout_minutes must be positive")
        return self


# dotted config key -> (EngineConfig field, parser)
_KEYMAP: dict[str, tuple[str, type]] = {
    "paths.graph": ("graph_path", str),
    "paths.word_vectors": ("word_vectors_path", str),
    "paths.aliases": ("aliases_path", str),
    "paths.templates": ("templates_path", str),
    "paths.stopwords": ("stopwords_path", str),
    "paths.pos_lexicon": ("pos_lexicon_path", str),
    "paths.parameters": ("parameters_path", str),
    "paths.movie_map": ("movie_map_path", str),
    "hierarchy.category_predicate": ("category_predicate", str),
    "embedding.dim": ("dim", int),
    "rgcn.layers": ("layers", int),
    "rgcn.activation": ("activation", str),
    "reasoning.tau": ("tau", float),
    "encoder.decay": ("decay", float),
    "portrait.decay": ("portrait_decay", float),
    "portrait.k": ("k", int),
    "caps.middle": ("cap_middle", int),
    "caps.leaf": ("cap_leaf", int),
    "mode": ("mode", str),
    "seed": ("seed", int),
    "service.session_timeout_minutes": ("session_timeout_minutes", float),
}

_PATH_FIELDS = {name for name, _ in (_KEYMAP[k] for k in _KEYMAP if k.startswith("paths."))}


def load_config(path) -> EngineConfig:
    """Parse, apply defaults, resolve paths, validate ranges.

    Unknown keys warn rather than fail so configs can carry annotations for
    other tools; bad values are hard errors.
    """
    base = Path(path).parent
    cfg = EngineConfig()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path} line {lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _KEYMAP:
                log.warning("%s line %d: unknown config key %r ignored", path, lineno, key)
                continue
            field_name, parser = _KEYMAP[key]
            try:
                parsed = parser(value)
            except ValueError:
                raise ValueError(
                    f"{path} line {lineno}: invalid value {value!r} for {key}"
                ) from None
            if field_name in _PATH_FIELDS:
                parsed = str((base / parsed).resolve()) if not Path(parsed).is_absolute() else parsed
            setattr(cfg, field_name, parsed)
    return cfg.validate()


def config_summary(cfg: EngineConfig) -> str:
    parts = []
    for f in fields(cfg):
        parts.append(f"{f.name}={getattr(cfg, f.name)}")
    return "EngineConfig(" + ", ".join(parts) + ")"
