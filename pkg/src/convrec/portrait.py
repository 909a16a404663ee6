"""User portraits: attention over mentioned-entity embeddings, plus the
hierarchical variant that tracks per-genre interest scores across turns."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import NodeEmbeddingTable, TextVector, cosine
from .knowledge import Hierarchy


@dataclass(frozen=True)
class AttentionParams:
    W_p: np.ndarray  # (d, d)
    w_p: np.ndarray  # (d,)

    def __post_init__(self):
        if self.W_p.ndim != 2 or self.W_p.shape[0] != self.W_p.shape[1]:
            raise ValueError(f"W_p must be square, got {self.W_p.shape}")
        if self.w_p.shape != (self.W_p.shape[0],):
            raise ValueError(f"w_p shape {self.w_p.shape} incompatible with W_p {self.W_p.shape}")


@dataclass(frozen=True)
class Portrait:
    """Attention-pooled interest vector with its weights and input ids."""

    vector: np.ndarray
    weights: np.ndarray
    inputs: tuple[str, ...]
    empty: bool = False


def empty_portrait(dim: int) -> Portrait:
    """Fallback when nothing has been mentioned: zero vector, flagged."""
    return Portrait(np.zeros(dim), np.zeros(0), (), empty=True)


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - np.max(scores)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def attention_portrait(
    ids: list[str], vectors: list[np.ndarray], params: AttentionParams
) -> Portrait:
    """alpha = softmax(w_p . tanh(W_p M)), p = sum_i alpha_i h_i."""
    if len(ids) != len(vectors):
        raise ValueError("ids and vectors must align")
    if not ids:
        raise ValueError("empty entity set: portrait undefined, caller must fall back")
    M = np.stack([np.asarray(v, dtype=float) for v in vectors])  # (n, d)
    scores = np.tanh(M @ params.W_p.T) @ params.w_p  # (n,)
    alpha = _softmax(scores)
    p = alpha @ M
    return Portrait(vector=p, weights=alpha, inputs=tuple(ids))


@dataclass
class HierScores:
    """Accumulated utterance-to-node cosine scores over the hierarchy."""

    scores: dict[str, float]
    category_ids: tuple[str, ...]
    turn_count: int = 0


def new_hier_scores(hierarchy: Hierarchy) -> HierScores:
    scores = {nid: 0.0 for nid in hierarchy.node_ids()}
    return HierScores(scores=scores, category_ids=tuple(hierarchy.categories()))


def update_hier_scores(
    scores: HierScores, utterance_vec: TextVector, nodes: NodeEmbeddingTable
) -> HierScores:
    """Add cosine(utterance, node) to every node's running score.

    A flagged-empty utterance vector is all zeros, so every cosine is 0 and
    the update degenerates to a turn-count increment.
    """
    for node_id in scores.scores:
        v = nodes.get(node_id)
        if v is None:
            continue
        scores.scores[node_id] += cosine(utterance_vec.values, v)
    scores.turn_count += 1
    return scores


def top_k_categories(scores: HierScores, k: int = 2) -> list[str]:
    """Highest-scoring categories, ties broken by ascending id, truncated to k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(scores.category_ids, key=lambda cid: (-scores.scores[cid], cid))
    return ranked[:k]


def hier_portrait(
    selected: list[str], embeddings: dict[str, np.ndarray], params: AttentionParams
) -> Portrait:
    """Same attention mechanics as the flat portrait, over the selected genres."""
    if not selected:
        raise ValueError("empty category selection")
    return attention_portrait(selected, [embeddings[c] for c in selected], params)
