"""convrec: a deterministic conversational recommender.

The engine reasons over a small knowledge graph with a genre->title hierarchy:
each turn it extracts mentions, tracks per-genre interest scores, builds a
three-layer reasoning tree (dialog act -> attributes -> items), and realizes
the tree as text. Two modes share all parameters: `baseline` follows a single
blended interest vector; `hierarchical` keeps the user's top genres apart so
recommendations can track interest shifts.
"""

from .config import EngineConfig, load_config
from .dialogue import Session, SystemResponse, advance, detect_mentions
from .engine import Engine, build_engine
from .ingest import import_redial, load_movie_map
from .knowledge import Entity, Hierarchy, KnowledgeGraph, RelationTriple, build_hierarchy, load_graph
from .metrics import MetricsReport, TransitionMatrix
from .portrait import Portrait
from .reasoning import ReasoningTree, WalkConfig
from .replay import ReplayResult, run_both, run_replay

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "EngineConfig",
    "Entity",
    "Hierarchy",
    "KnowledgeGraph",
    "MetricsReport",
    "Portrait",
    "ReasoningTree",
    "RelationTriple",
    "ReplayResult",
    "Session",
    "SystemResponse",
    "TransitionMatrix",
    "WalkConfig",
    "advance",
    "build_engine",
    "build_hierarchy",
    "detect_mentions",
    "import_redial",
    "load_config",
    "load_graph",
    "load_movie_map",
    "run_both",
    "run_replay",
    "__version__",
]
