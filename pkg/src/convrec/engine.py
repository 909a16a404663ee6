"""Engine: the immutable bundle of graph, embeddings, and parameters that all
sessions share, plus the session factory.

Parameters default to the analytic preset — identity matrices and zero gate
weights — which makes every stage of the untrained pipeline hand-checkable:
the gate sits at 0.5, act logits tie at zero (resolved to Recommend), and
entity scores reduce to plain dot products with the blended context.
"""

from __future__ import annotations

import itertools
from importlib import resources

import numpy as np

from .config import EngineConfig
from .dialogue import DecayedBagEncoder, MentionLexicon, Session, SystemResponse, advance, observe_system, observe_user, respond
from .embedding import (
    NodeEmbeddingTable,
    RgcnParameters,
    TokenFilter,
    WordEmbeddingTable,
    build_node_table,
    hashed_word_vector,
    load_pos_lexicon,
    load_stopwords,
    load_word_vectors,
    rgcn_embedding_table,
    text_vector,
    tokenize,
)
from .generation import TemplateSet, default_templates, load_templates
from .knowledge import Hierarchy, KnowledgeGraph, build_hierarchy, load_graph
from .portrait import AttentionParams, new_hier_scores
from .reasoning import GateParams, IntentParams, WalkConfig


def _preset_rgcn(
    graph: KnowledgeGraph,
    node_table: NodeEmbeddingTable,
    word_table: WordEmbeddingTable,
    token_filter: TokenFilter,
    dim: int,
    layers: int,
    seed: int,
    activation: str,
) -> RgcnParameters:
    """Identity relation/self matrices; base vectors from the hierarchy node
    table, then from entity descriptions, then a seeded hash fallback."""
    eye = np.eye(dim)
    base: dict[str, np.ndarray] = {}
    for eid, ent in graph.entities.items():
        node_vec = node_table.get(eid)
        if node_vec is not None and eid not in node_table.empty_ids:
            base[eid] = node_vec
            continue
        if ent.description:
            tv = text_vector(ent.description, word_table, token_filter)
            if not tv.empty:
                base[eid] = tv.values
                continue
        base[eid] = hashed_word_vector(f"entity:{eid}", dim, seed)
    relation_weights = [{r: eye for r in graph.predicates()} for _ in range(layers)]
    self_weights = [eye for _ in range(layers)]
    return RgcnParameters(
        relation_weights=relation_weights,
        self_weights=self_weights,
        base=base,
        activation=activation,
    )


def _load_parameter_overrides(path):
    """Optional .npz with any of: W_p, w_p, W_int1, W_int2, gate_w1, gate_w2.

    Missing arrays keep their preset values, so a file can override just the
    attention weights, say, without restating everything else.
    """
    data = np.load(path)
    out = {}
    for key in ("W_p", "w_p", "W_int1", "W_int2", "gate_w1", "gate_w2"):
        if key in data.files:
            out[key] = np.asarray(data[key], dtype=float)
    return out


class Engine:
    def __init__(self, config: EngineConfig):
        if not config.graph_path:
            raise ValueError("config needs paths.graph")
        try:
            self.graph = load_graph(config.graph_path)
        except OSError as exc:
            raise ValueError(f"cannot load graph {config.graph_path!r}: {exc}") from exc

        self.config = config
        self.hierarchy: Hierarchy = build_hierarchy(self.graph, config.category_predicate)

        if config.stopwords_path:
            stopwords = load_stopwords(config.stopwords_path)
        else:
            with resources.as_file(resources.files("convrec.data") / "stopwords.txt") as p:
                stopwords = load_stopwords(p)
        pos = load_pos_lexicon(config.pos_lexicon_path) if config.pos_lexicon_path else None
        self.token_filter = TokenFilter(stopwords=stopwords, pos=pos)

        if config.word_vectors_path:
            self.word_table = load_word_vectors(config.word_vectors_path)
        else:
            # hashed fallback vocabulary: every token appearing in any entity
            # name or description, so text still lands somewhere deterministic
            vocab = set()
            for ent in self.graph.entities.values():
                vocab.update(self.token_filter(tokenize(ent.name)))
                vocab.update(self.token_filter(tokenize(ent.description)))
            vectors = {
                tok: hashed_word_vector(tok, config.dim, config.seed) for tok in sorted(vocab)
            }
            self.word_table = WordEmbeddingTable(vectors, source="hashed")
        self.dim = self.word_table.dim

        self.node_table = build_node_table(
            self.graph, self.hierarchy, self.word_table, self.token_filter
        )
        self.rgcn_params = _preset_rgcn(
            self.graph,
            self.node_table,
            self.word_table,
            self.token_filter,
            self.dim,
            config.layers,
            config.seed,
            config.activation,
        )
        self.embeddings = rgcn_embedding_table(self.graph, self.rgcn_params)

        d = self.dim
        self.attention_params = AttentionParams(W_p=np.eye(d), w_p=np.ones(d))
        self.intent_params = IntentParams(W1=np.eye(d), W2=np.zeros((3, d)))
        self.gate_params = GateParams(w1=np.zeros(2 * d + 3), w2=np.zeros(3 * d + 3))
        if config.parameters_path:
            ov = _load_parameter_overrides(config.parameters_path)
            if "W_p" in ov or "w_p" in ov:
                self.attention_params = AttentionParams(
                    W_p=ov.get("W_p", self.attention_params.W_p),
                    w_p=ov.get("w_p", self.attention_params.w_p),
                )
            if "W_int1" in ov or "W_int2" in ov:
                self.intent_params = IntentParams(
                    W1=ov.get("W_int1", self.intent_params.W1),
                    W2=ov.get("W_int2", self.intent_params.W2),
                )
            if "gate_w1" in ov or "gate_w2" in ov:
                self.gate_params = GateParams(
                    w1=ov.get("gate_w1", self.gate_params.w1),
                    w2=ov.get("gate_w2", self.gate_params.w2),
                )

        aliases = load_aliases(config.aliases_path) if config.aliases_path else {}
        self.lexicon = MentionLexicon(self.graph, aliases)
        self.templates: TemplateSet = (
            load_templates(config.templates_path) if config.templates_path else default_templates()
        )
        self.encoder = DecayedBagEncoder(
            table=self.word_table, token_filter=self.token_filter, decay=config.decay
        )
        self._session_counter = itertools.count(1)

    def walk_config(self, mode: str) -> WalkConfig:
        return WalkConfig(
            tau=self.config.tau,
            depth=2,
            cap_middle=self.config.cap_middle,
            cap_leaf=self.config.cap_leaf,
            mode=mode,
            top_k=self.config.k,
        )

    def new_session(self, mode: str | None = None, session_id: str | None = None) -> Session:
        mode = mode or self.config.mode
        if mode not in ("baseline", "hierarchical"):
            raise ValueError(f"unknown mode {mode!r}")
        sid = session_id if session_id is not None else f"s{next(self._session_counter)}"
        return Session(
            id=sid,
            mode=mode,
            seed=self.config.seed,
            hier_scores=new_hier_scores(self.hierarchy),
        )

    # thin delegations so callers can treat the engine as the API surface
    def observe_user(self, session: Session, text: str, extra_mentions=None) -> None:
        observe_user(session, text, self, extra_mentions=extra_mentions)

    def observe_system(self, session: Session, text: str, mentions=None) -> None:
        observe_system(session, text, mentions=mentions)

    def respond(self, session: Session, forced_act: str | None = None) -> SystemResponse:
        return respond(session, self, forced_act=forced_act)

    def advance(self, session: Session, user_text: str) -> SystemResponse:
        return advance(session, user_text, self)

    def startup_summary(self) -> str:
        kinds = {}
        for ent in self.graph.entities.values():
            kinds[ent.kind] = kinds.get(ent.kind, 0) + 1
        kind_str = ", ".join(f"{k}={kinds[k]}" for k in sorted(kinds))
        return (
            f"entities={len(self.graph.entities)} ({kind_str}) "
            f"triples={len(self.graph.triples)} "
            f"categories={len(self.hierarchy.categories())} "
            f"dim={self.dim} layers={self.config.layers} "
            f"vocab={len(self.word_table)} ({self.word_table.source}) "
            f"mode={self.config.mode} tau={self.config.tau}"
        )


def load_aliases(path) -> dict[str, str]:
    """`alias<TAB>entity_id` lines; `#` comments."""
    aliases: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            alias, sep, eid = line.partition("\t")
            if not sep or not eid.strip():
                raise ValueError(f"{path} line {lineno}: expected alias<TAB>entity_id")
            aliases[alias.strip()] = eid.strip()
    return aliases


def build_engine(config: EngineConfig) -> Engine:
    return Engine(config)
