"""Reasoning-tree induction.

A tree has the dialog act at the root, attribute-level entities in the middle
layer, and item-level entities at the leaves. Selection at each layer runs the
WALK rule over gated-context scores; in hierarchical mode the middle layer of a
Recommend tree is instead driven by the accumulated genre scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .knowledge import (
    ACT_CHAT,
    ACT_QUERY,
    ACT_RECOMMEND,
    Hierarchy,
    KnowledgeGraph,
    candidate_entities,
)
from .portrait import HierScores, Portrait, top_k_categories

ACTS = (ACT_RECOMMEND, ACT_QUERY, ACT_CHAT)

MODE_BASELINE = "baseline"
MODE_HIERARCHICAL = "hierarchical"
MODES = (MODE_BASELINE, MODE_HIERARCHICAL)


@dataclass(frozen=True)
class IntentParams:
    """Two-layer act scorer: i = W2 . relu(W1 . u), one logit per act."""

    W1: np.ndarray
    W2: np.ndarray

    def __post_init__(self):
        if self.W2.shape != (3, self.W1.shape[0]):
            raise ValueError(
                f"W2 shape {self.W2.shape} incompatible with W1 {self.W1.shape}; need (3, hidden)"
            )


@dataclass(frozen=True)
class GateParams:
    """Gate weights for the two context cases: parent-is-root and deeper."""

    w1: np.ndarray  # (2d + 3,)
    w2: np.ndarray  # (3d + 3,)


@dataclass(frozen=True)
class WalkConfig:
    tau: float = 0.0
    depth: int = 2
    cap_middle: int | None = 1
    cap_leaf: int | None = 2
    mode: str = MODE_BASELINE
    top_k: int = 2

    def __post_init__(self):
        if self.depth not in (1, 2):
            raise ValueError("depth must be 1 or 2 (at most a three-layer tree)")
        for cap in (self.cap_middle, self.cap_leaf):
            if cap is not None and cap < 1:
                raise ValueError("caps must be >= 1 when present")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass
class TreeNode:
    payload: str  # dialog act at the root, entity id elsewhere
    name: str
    layer: str  # root | middle | leaf
    context: np.ndarray | None = None
    gamma: float | None = None
    score: float | None = None
    selection_score: float | None = None  # genre-score rank value (hierarchical middles)
    children: list["TreeNode"] = field(default_factory=list)
    child_context: np.ndarray | None = None


@dataclass
class ReasoningTree:
    root: TreeNode
    act: str
    logits: np.ndarray
    flags: list[str] = field(default_factory=list)

    @property
    def middles(self) -> list[TreeNode]:
        return self.root.children

    def leaves(self) -> list[TreeNode]:
        return [leaf for mid in self.root.children for leaf in mid.children]


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _sigmoid(x: float) -> float:
    return float(1.0 / (1.0 + np.exp(-x)))


def dialog_act(
    u: np.ndarray, params: IntentParams, forced: str | None = None
) -> tuple[str, np.ndarray]:
    """Act logits from the context vector; argmax with ties to the lowest index.

    `forced` bypasses the decision (replay uses gold acts) but logits are still
    returned for the downstream context gates.
    """
    logits = params.W2 @ _relu(params.W1 @ u)
    if forced is not None:
        if forced not in ACTS:
            raise ValueError(f"unknown dialog act {forced!r}")
        return forced, logits
    return ACTS[int(np.argmax(logits))], logits


def context_vector(
    u: np.ndarray,
    p: np.ndarray,
    i: np.ndarray,
    params: GateParams,
    parent_embedding: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Gated blend c = gamma*u + (1-gamma)*p.

    The gate input concatenates [u; p; i] when the parent is the root and
    additionally the parent entity's embedding one layer down.
    """
    if parent_embedding is None:
        feats = np.concatenate([u, p, i])
        if params.w1.shape != feats.shape:
            raise ValueError(f"w1 shape {params.w1.shape} != gate input {feats.shape}")
        gamma = _sigmoid(float(params.w1 @ feats))
    else:
        feats = np.concatenate([u, p, i, parent_embedding])
        if params.w2.shape != feats.shape:
            raise ValueError(f"w2 shape {params.w2.shape} != gate input {feats.shape}")
        gamma = _sigmoid(float(params.w2 @ feats))
    c = gamma * u + (1.0 - gamma) * p
    return c, gamma


def score_entity(h: np.ndarray, c: np.ndarray, c_parent: np.ndarray) -> float:
    if h.shape != c.shape or c.shape != c_parent.shape:
        raise ValueError(f"dimension mismatch: {h.shape}, {c.shape}, {c_parent.shape}")
    return float(np.dot(h, c + c_parent))


def walk(
    candidates: list[str],
    scores: dict[str, float],
    tau: float,
    cap: int | None = None,
) -> list[str]:
    """All candidates scoring above tau, best first; top-1 fallback when none do."""
    ranked = sorted(candidates, key=lambda c: (-scores[c], c))
    selected = [c for c in ranked if scores[c] > tau]
    if not selected:
        if not ranked:
            return []
        selected = [ranked[0]]
    if cap is not None:
        selected = selected[:cap]
    return selected


def _blend(u, portrait: Portrait, logits, gate: GateParams, parent_embedding=None):
    """context_vector with the empty-portrait override (gate forced open)."""
    if portrait.empty:
        return u.copy(), 1.0
    return context_vector(u, portrait.vector, logits, gate, parent_embedding)


def active_categories(hier_scores: HierScores, tau: float, k: int) -> list[str]:
    """Genres the user has shown affinity for: top-k by accumulated score,
    filtered by the walk rule so a zero-signal genre stays out even when k
    has room for it. This one selection drives both the hierarchical middle
    layer and the genre portrait blended into the root context."""
    ranked = top_k_categories(hier_scores, k)
    selection = {cid: hier_scores.scores[cid] for cid in ranked}
    return walk(ranked, selection, tau, k)


def induce_tree(
    *,
    u: np.ndarray,
    portrait: Portrait,
    hier_port: Portrait | None,
    mentioned: list[str],
    hier_scores: HierScores | None,
    graph: KnowledgeGraph,
    hierarchy: Hierarchy,
    embeddings: dict[str, np.ndarray],
    intent: IntentParams,
    gate: GateParams,
    config: WalkConfig,
    forced_act: str | None = None,
) -> ReasoningTree:
    """Run act selection and the layer-wise walk, producing the full tree.

    Hierarchical mode changes Recommend middle-layer reasoning only: candidates
    are the hierarchy's categories, ranking comes from the accumulated genre
    scores (top_k selected), and the portrait blended into the context is the
    two-genre portrait. The leaf layer always uses the flat portrait.
    """
    act, logits = dialog_act(u, intent, forced_act)
    hier_recommend = (
        config.mode == MODE_HIERARCHICAL
        and act == ACT_RECOMMEND
        and hier_scores is not None
        and hier_port is not None
        and bool(hierarchy.categories())
    )
    flags: list[str] = []
    if portrait.empty:
        flags.append("empty_portrait")

    p_mid = hier_port if hier_recommend else portrait
    c_mid, gamma_mid = _blend(u, p_mid, logits, gate)

    root = TreeNode(payload=act, name=act, layer="root", child_context=c_mid)
    tree = ReasoningTree(root=root, act=act, logits=logits, flags=flags)

    zero = np.zeros_like(u)
    if hier_recommend:
        middle_ids = active_categories(hier_scores, config.tau, config.top_k)
        selection = {cid: hier_scores.scores[cid] for cid in middle_ids}
    else:
        cands = candidate_entities(graph, act, "middle", set(mentioned), hierarchy)
        cand_scores = {c: score_entity(embeddings[c], c_mid, zero) for c in cands}
        middle_ids = walk(cands, cand_scores, config.tau, config.cap_middle)
        selection = None

    if not middle_ids:
        flags.append("no_middle_candidates")
        return tree

    for mid in middle_ids:
        node = TreeNode(
            payload=mid,
            name=graph.entity(mid).name,
            layer="middle",
            context=c_mid,
            gamma=gamma_mid,
            score=score_entity(embeddings[mid], c_mid, zero),
            selection_score=None if selection is None else selection[mid],
        )
        if config.depth >= 2:
            c_leaf, gamma_leaf = _blend(u, portrait, logits, gate, embeddings[mid])
            node.child_context = c_leaf
            leaf_cands = candidate_entities(graph, act, "leaf", {mid}, hierarchy)
            leaf_scores = {c: score_entity(embeddings[c], c_leaf, c_mid) for c in leaf_cands}
            for leaf in walk(leaf_cands, leaf_scores, config.tau, config.cap_leaf):
                node.children.append(
                    TreeNode(
                        payload=leaf,
                        name=graph.entity(leaf).name,
                        layer="leaf",
                        context=c_leaf,
                        gamma=gamma_leaf,
                        score=leaf_scores[leaf],
                    )
                )
        root.children.append(node)
    return tree


def rank_items(tree: ReasoningTree, item_ids: list[str], embeddings: dict[str, np.ndarray]) -> list[str]:
    """Full-universe item ranking for retrieval metrics.

    Tree leaves come first in tree order; every other item is scored with the
    leaf-layer rule under the top middle node (or the root context when the
    tree has no middle layer) and appended best-first.
    """
    universe = set(item_ids)
    ranked: list[str] = []
    seen: set[str] = set()
    for leaf in tree.leaves():
        if leaf.payload in universe and leaf.payload not in seen:
            ranked.append(leaf.payload)
            seen.add(leaf.payload)
    if tree.root.children:
        top = tree.root.children[0]
        c_parent = top.context
        c = top.child_context if top.child_context is not None else top.context
    else:
        c = tree.root.child_context
        c_parent = np.zeros_like(c)
    rest = [i for i in item_ids if i not in seen]
    scores = {i: score_entity(embeddings[i], c, c_parent) for i in rest}
    rest.sort(key=lambda i: (-scores[i], i))
    return ranked + rest


def linearize(tree: ReasoningTree) -> list[str]:
    """Pre-order token sequence: [ACT] act [SEL] middle [ITEM] leaf ..."""
    tokens = ["[ACT]", tree.act]
    for mid in tree.root.children:
        tokens.extend(["[SEL]", mid.name])
        for leaf in mid.children:
            tokens.extend(["[ITEM]", leaf.name])
    return tokens


def linearize_str(tree: ReasoningTree) -> str:
    return " ".join(linearize(tree))


def _node_json(node: TreeNode) -> dict:
    # selection_score stays in-process: the exported schema is the same for
    # both modes, and the genre ranking is already in diagnostics
    return {
        "id": node.payload,
        "name": node.name,
        "layer": node.layer,
        "score": None if node.score is None else float(node.score),
        "gamma": None if node.gamma is None else float(node.gamma),
        "children": [_node_json(ch) for ch in node.children],
    }


def tree_to_json(tree: ReasoningTree) -> dict:
    return {
        "act": tree.act,
        "flags": sorted(tree.flags),
        "nodes": [_node_json(mid) for mid in tree.root.children],
    }
