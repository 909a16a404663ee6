"""Vector machinery: word vectors, text/node vectorization, relational graph
convolution, and cosine similarity.

All functions here are pure and deterministic; the only sources of vectors are
embedding files, descriptions, and a seeded hash fallback.
"""

from __future__ import annotations

import hashlib
import string
from dataclasses import dataclass, field

import numpy as np

from .knowledge import KIND_CATEGORY, KIND_ITEM, Hierarchy, KnowledgeGraph

_PUNCT_TABLE = str.maketrans({ch: " " for ch in string.punctuation})


def tokenize(text: str) -> list[str]:
    """Lowercase, replace punctuation with spaces, split on whitespace."""
    return text.lower().translate(_PUNCT_TABLE).split()


@dataclass(frozen=True)
class TokenFilter:
    """Keeps content tokens: drops stopwords and, when a POS lexicon is given,
    anything not tagged NOUN or ADJ in it."""

    stopwords: frozenset[str] = frozenset()
    pos: dict[str, str] | None = None

    def __call__(self, tokens: list[str]) -> list[str]:
        kept = [t for t in tokens if t not in self.stopwords]
        if self.pos is not None:
            kept = [t for t in kept if self.pos.get(t) in ("NOUN", "ADJ")]
        return kept


def load_stopwords(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.strip().lower() for line in fh if line.strip() and not line.startswith("#")
        )


def load_pos_lexicon(path) -> dict[str, str]:
    """`token<TAB>POS` lines; later duplicates win."""
    lex: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            token, _, pos = line.partition("\t")
            lex[token.lower()] = pos.strip().upper()
    return lex


class WordEmbeddingTable:
    """token -> vector, with case-normalized lookup and a uniform dimension."""

    def __init__(self, vectors: dict[str, np.ndarray], source: str = "file"):
        if not vectors:
            raise ValueError("empty word vector table")
        self.vectors = {tok.lower(): np.asarray(v, dtype=float) for tok, v in vectors.items()}
        dims = {v.shape for v in self.vectors.values()}
        if len(dims) != 1 or len(next(iter(dims))) != 1:
            raise ValueError(f"inconsistent vector shapes in table: {sorted(dims)}")
        self.dim = next(iter(dims))[0]
        if self.dim < 1:
            raise ValueError("vector dimension must be >= 1")
        self.source = source

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token.lower())


def load_word_vectors(path) -> WordEmbeddingTable:
    """word2vec text format: header `<count> <dim>`, then `token c1 ... cd` rows."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: header must be '<count> <dim>'")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise ValueError(f"{path}: non-integer header fields {header!r}") from None
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != dim + 1:
                raise ValueError(
                    f"{path} line {lineno}: expected {dim} components, got {len(parts) - 1}"
                )
            try:
                vectors[parts[0]] = np.array([float(x) for x in parts[1:]], dtype=float)
            except ValueError:
                raise ValueError(f"{path} line {lineno}: non-numeric component") from None
    if len(vectors) != count:
        raise ValueError(f"{path}: header declares {count} rows, found {len(vectors)}")
    return WordEmbeddingTable(vectors, source="file")


def save_word_vectors(table: WordEmbeddingTable, path) -> None:
    """Write the table in word2vec text form, components to 6 decimal places."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vectors)} {table.dim}\n")
        for token in sorted(table.vectors):
            comps = " ".join(f"{x:.6f}" for x in table.vectors[token])
            fh.write(f"{token} {comps}\n")


def hashed_word_vector(token: str, dim: int, seed: int = 0) -> np.ndarray:
    """Unit vector fully determined by (token, dim, seed).

    Each component is carved out of a SHA-256 digest, so the result is stable
    across platforms and interpreter versions (no RNG state involved).
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    comps = np.empty(dim, dtype=float)
    for i in range(dim):
        digest = hashlib.sha256(f"{seed}:{token}:{i}".encode("utf-8")).digest()
        raw = int.from_bytes(digest[:8], "big")
        comps[i] = raw / float(2**64) * 2.0 - 1.0
    norm = np.linalg.norm(comps)
    if norm == 0.0:  # astronomically unlikely, but keep the unit-norm contract
        comps[0] = 1.0
        norm = 1.0
    return comps / norm


@dataclass(frozen=True)
class TextVector:
    """Mean-of-word-vectors result; `empty` marks that no token survived."""

    values: np.ndarray
    empty: bool


def text_vector(text: str, table: WordEmbeddingTable, token_filter: TokenFilter) -> TextVector:
    """Arithmetic mean of in-vocabulary vectors of tokens passing the filter."""
    kept = [table.get(t) for t in token_filter(tokenize(text))]
    kept = [v for v in kept if v is not None]
    if not kept:
        return TextVector(np.zeros(table.dim), empty=True)
    return TextVector(np.mean(kept, axis=0), empty=False)


class NodeEmbeddingTable:
    """Vectors for the hierarchy's item and category nodes.

    Category vectors are the componentwise mean of their members' vectors, so
    a genre sits at the centroid of its titles in word-vector space.
    """

    def __init__(self, vectors: dict[str, np.ndarray], empty_ids: set[str], dim: int):
        self.vectors = vectors
        self.empty_ids = empty_ids
        self.dim = dim

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.vectors

    def get(self, node_id: str) -> np.ndarray | None:
        return self.vectors.get(node_id)

    def node_ids(self) -> list[str]:
        return sorted(self.vectors)


def item_node_vector(
    item: str, graph: KnowledgeGraph, table: WordEmbeddingTable, token_filter: TokenFilter
) -> TextVector:
    """Vector of an item = text vector of its description (flagged zero if absent)."""
    ent = graph.entity(item)
    return text_vector(ent.description, table, token_filter)


def category_node_vector(category: str, hierarchy: Hierarchy, items: NodeEmbeddingTable) -> np.ndarray:
    members = hierarchy.members_of.get(category)
    if not members:
        raise ValueError(f"category {category!r} has no members")
    vecs = []
    for m in members:
        v = items.get(m)
        if v is None:
            raise ValueError(f"member {m!r} of {category!r} has no vector")
        vecs.append(v)
    return np.mean(vecs, axis=0)


def build_node_table(
    graph: KnowledgeGraph,
    hierarchy: Hierarchy,
    table: WordEmbeddingTable,
    token_filter: TokenFilter,
) -> NodeEmbeddingTable:
    vectors: dict[str, np.ndarray] = {}
    empty_ids: set[str] = set()
    for item_id in hierarchy.items():
        tv = item_node_vector(item_id, graph, table, token_filter)
        vectors[item_id] = tv.values
        if tv.empty:
            empty_ids.add(item_id)
    partial = NodeEmbeddingTable(vectors, empty_ids, table.dim)
    for cat_id in hierarchy.categories():
        vectors[cat_id] = category_node_vector(cat_id, hierarchy, partial)
    return NodeEmbeddingTable(vectors, empty_ids, table.dim)


@dataclass
class RgcnParameters:
    """Per-layer relation and self matrices plus the base embedding table h^0."""

    relation_weights: list[dict[str, np.ndarray]]
    self_weights: list[np.ndarray]
    base: dict[str, np.ndarray]
    activation: str = "relu"

    def __post_init__(self):
        if len(self.relation_weights) != len(self.self_weights):
            raise ValueError("relation_weights and self_weights must have equal layer counts")
        if not self.self_weights:
            raise ValueError("at least one layer required")
        if self.activation not in ("relu", "sigmoid"):
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def layers(self) -> int:
        return len(self.self_weights)


def _activate(x: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(x, 0.0)
    return 1.0 / (1.0 + np.exp(-x))


def rgcn_embedding_table(graph: KnowledgeGraph, params: RgcnParameters) -> dict[str, np.ndarray]:
    """Iterate the relational convolution for every entity.

    One layer: h_i <- sigma( sum_r W_r . mean_{j in N_r(i)} h_j  +  W_0 h_i ),
    where relations with no neighbors contribute nothing.
    """
    h = {}
    for eid in graph.entities:
        if eid not in params.base:
            raise ValueError(f"no base embedding for entity {eid!r}")
        h[eid] = np.asarray(params.base[eid], dtype=float)
    dim = next(iter(h.values())).shape[0]
    for layer in range(params.layers):
        w_self = params.self_weights[layer]
        if w_self.shape != (dim, dim):
            raise ValueError(f"layer {layer} self matrix shape {w_self.shape} != ({dim}, {dim})")
        w_rel = params.relation_weights[layer]
        nxt: dict[str, np.ndarray] = {}
        for eid in graph.entities:
            acc = w_self @ h[eid]
            for rel, w in w_rel.items():
                nbrs = graph.neighbors(eid, rel)
                if not nbrs:
                    continue
                if w.shape != (dim, dim):
                    raise ValueError(
                        f"layer {layer} relation {rel!r} matrix shape {w.shape} != ({dim}, {dim})"
                    )
                mean_nbr = np.mean([h[j] for j in sorted(nbrs)], axis=0)
                acc = acc + w @ mean_nbr
            nxt[eid] = _activate(acc, params.activation)
        h = nxt
    return h


def rgcn_entity_embedding(graph: KnowledgeGraph, params: RgcnParameters, e: str) -> np.ndarray:
    graph.entity(e)
    return rgcn_embedding_table(graph, params)[e]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return np.zeros_like(v)
    return v / norm
