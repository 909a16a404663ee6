"""Per-conversation state and the turn loop.

A Session owns everything that changes while talking: turns, the mentioned
entity list E_t, the accumulated genre scores, and the dialogue context vector.
The knowledge graph and all parameter tables stay shared and read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .embedding import TextVector, normalize, text_vector, tokenize
from .generation import realize
from .knowledge import ACT_QUERY, KIND_CATEGORY, KnowledgeGraph
from .portrait import (
    HierScores,
    Portrait,
    attention_portrait,
    empty_portrait,
    hier_portrait,
    update_hier_scores,
)
from .reasoning import ReasoningTree, active_categories, induce_tree, tree_to_json


@dataclass
class Turn:
    speaker: str  # "user" | "system"
    text: str
    mentions: list[str]
    turn_index: int


@dataclass
class Session:
    id: str
    mode: str
    seed: int
    turns: list[Turn] = field(default_factory=list)
    mentioned: list[str] = field(default_factory=list)  # E_t, first-mention order
    hier_scores: HierScores | None = None
    context: np.ndarray | None = None
    context_empty: bool = True

    def last_system_text(self) -> str:
        for turn in reversed(self.turns):
            if turn.speaker == "system":
                return turn.text
        return ""


class MentionLexicon:
    """Case-insensitive leftmost-longest phrase matcher over entity names.

    Names and aliases are tokenized the same way as input text, so punctuation
    and casing differences don't break matches.
    """

    def __init__(self, graph: KnowledgeGraph, aliases: dict[str, str] | None = None):
        self.phrases: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        entries: list[tuple[str, str]] = [(e.name, e.id) for e in graph.entities.values()]
        for alias, eid in (aliases or {}).items():
            graph.entity(eid)  # fail fast on aliases pointing nowhere
            entries.append((alias, eid))
        for name, eid in entries:
            tokens = tuple(tokenize(name))
            if not tokens:
                continue
            self.phrases.setdefault(tokens[0], []).append((tokens, eid))
        for bucket in self.phrases.values():
            # longest first so "son of the mask" beats "the mask"; id breaks ties
            bucket.sort(key=lambda entry: (-len(entry[0]), entry[1]))

    def detect(self, text: str) -> list[str]:
        tokens = tokenize(text)
        found: list[str] = []
        i = 0
        while i < len(tokens):
            bucket = self.phrases.get(tokens[i], ())
            for phrase, eid in bucket:
                if tuple(tokens[i : i + len(phrase)]) == phrase:
                    if eid not in found:
                        found.append(eid)
                    i += len(phrase) - 1
                    break
            i += 1
        return found


def detect_mentions(text: str, graph: KnowledgeGraph, aliases: dict[str, str] | None = None) -> list[str]:
    """One-shot detection; engines should build a MentionLexicon once instead."""
    return MentionLexicon(graph, aliases).detect(text)


class ContextEncoder(Protocol):
    def __call__(self, prev_u: np.ndarray | None, prev_system_text: str, user_text: str) -> TextVector:
        ...


@dataclass(frozen=True)
class DecayedBagEncoder:
    """Default context encoder: u_t = normalize(decay * u_{t-1} + v([y_{t-1}; x_t])).

    The text vector of the previous system turn concatenated with the new user
    turn pulls the context toward the current exchange; the decayed previous
    context keeps a fading memory of the conversation so far.
    """

    table: object  # WordEmbeddingTable
    token_filter: object  # TokenFilter
    decay: float = 0.5

    def __call__(self, prev_u: np.ndarray | None, prev_system_text: str, user_text: str) -> TextVector:
        fresh = text_vector(f"{prev_system_text} {user_text}", self.table, self.token_filter)
        if prev_u is None:
            combined = fresh.values
        else:
            combined = self.decay * prev_u + fresh.values
        u = normalize(combined)
        return TextVector(u, empty=bool(np.linalg.norm(u) == 0.0))


def encode_context(session: Session, new_user_text: str, encoder: ContextEncoder) -> TextVector:
    return encoder(session.context, session.last_system_text(), new_user_text)


@dataclass
class SystemResponse:
    text: str
    act: str
    tree: ReasoningTree
    diagnostics: dict

    def to_json_dict(self) -> dict:
        return {
            "system_text": self.text,
            "act": self.act,
            "tree": tree_to_json(self.tree),
            "diagnostics": self.diagnostics,
        }


def observe_user(session: Session, text: str, engine, extra_mentions: list[str] | None = None) -> None:
    """Fold one user utterance into the session state (no response generated)."""
    mentions = engine.lexicon.detect(text)
    for eid in extra_mentions or []:
        if eid not in mentions:
            mentions.append(eid)
    session.turns.append(
        Turn(speaker="user", text=text, mentions=mentions, turn_index=len(session.turns))
    )
    new_u = encode_context(session, text, engine.encoder)
    session.context = new_u.values
    session.context_empty = new_u.empty
    for eid in mentions:
        if eid not in session.mentioned:
            session.mentioned.append(eid)
    utter_vec = text_vector(text, engine.word_table, engine.token_filter)
    if session.hier_scores is not None:
        update_hier_scores(session.hier_scores, utter_vec, engine.node_table)


def observe_system(session: Session, text: str, mentions: list[str] | None = None) -> None:
    """Record a system turn verbatim (replay feeds dataset turns through here)."""
    session.turns.append(
        Turn(speaker="system", text=text, mentions=list(mentions or []), turn_index=len(session.turns))
    )


def _portraits(session: Session, engine) -> tuple[Portrait, Portrait | None, list[str]]:
    """Flat portrait over mentioned genres, plus the genre-score portrait
    over whichever categories the user has shown affinity for (at most k)."""
    genre_ids = [
        eid for eid in session.mentioned if engine.graph.entity(eid).kind == KIND_CATEGORY
    ]
    if genre_ids:
        flat = attention_portrait(
            genre_ids, [engine.embeddings[g] for g in genre_ids], engine.attention_params
        )
    else:
        flat = empty_portrait(engine.dim)
    hier = None
    top = []
    if session.hier_scores is not None and session.hier_scores.category_ids:
        top = active_categories(session.hier_scores, engine.config.tau, engine.config.k)
        hier = hier_portrait(top, engine.embeddings, engine.attention_params)
    return flat, hier, top


def respond(session: Session, engine, forced_act: str | None = None) -> SystemResponse:
    """Induce a tree from the current state and realize it. Nothing is appended
    to the session — callers decide what enters the history."""
    flat, hier, top = _portraits(session, engine)
    if forced_act is None and not session.mentioned and session.context_empty:
        forced_act = ACT_QUERY  # nothing to go on yet: elicit instead of guessing
    u = session.context if session.context is not None else np.zeros(engine.dim)
    tree = induce_tree(
        u=u,
        portrait=flat,
        hier_port=hier,
        mentioned=session.mentioned,
        hier_scores=session.hier_scores,
        graph=engine.graph,
        hierarchy=engine.hierarchy,
        embeddings=engine.embeddings,
        intent=engine.intent_params,
        gate=engine.gate_params,
        config=engine.walk_config(session.mode),
        forced_act=forced_act,
    )
    text = realize(tree, engine.templates)
    scores = session.hier_scores.scores if session.hier_scores is not None else {}
    diagnostics = {
        "portrait": {
            "inputs": list(flat.inputs),
            "weights": [float(w) for w in flat.weights],
            "empty": flat.empty,
        },
        "hier_portrait": None
        if hier is None
        else {
            "inputs": list(hier.inputs),
            "weights": [float(w) for w in hier.weights],
        },
        "top_categories": [{"id": cid, "score": float(scores.get(cid, 0.0))} for cid in top],
        "category_scores": [
            {
                "id": cid,
                "name": engine.graph.entities[cid].name,
                "score": float(scores.get(cid, 0.0)),
            }
            for cid in sorted(
                engine.hierarchy.categories(), key=lambda c: (-scores.get(c, 0.0), c)
            )
        ],
        "mentioned": list(session.mentioned),
        "act_logits": [float(x) for x in tree.logits],
        "context_empty": session.context_empty,
        "mode": session.mode,
    }
    return SystemResponse(text=text, act=tree.act, tree=tree, diagnostics=diagnostics)


def advance(session: Session, user_text: str, engine) -> SystemResponse:
    """Full interactive turn: ingest the user utterance, respond, append both."""
    observe_user(session, user_text, engine)
    response = respond(session, engine)
    leaf_ids = [leaf.payload for leaf in response.tree.leaves()]
    observe_system(session, response.text, mentions=leaf_ids)
    return response
