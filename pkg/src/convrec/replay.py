"""Replay evaluation: run imported dialogues through the engine with teacher
forcing and score the annotated recommendation turns.

The dataset recommender's own utterances — not the engine's — are what enter
the dialogue history, so every system is evaluated against identical context.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from .ingest import ROLE_SEEKER, ReplayDialogue
from .knowledge import ACT_RECOMMEND
from .metrics import (
    MetricsReport,
    RankedRecommendation,
    TransitionMatrix,
    bleu,
    coverage,
    distinct_n,
    recall_at_k,
    token_f1,
    transition_matrix,
)
from .reasoning import rank_items

log = logging.getLogger(__name__)

DEFAULT_KS = (1, 10, 50)


@dataclass
class ReplayResult:
    mode: str
    report: MetricsReport
    transitions: TransitionMatrix
    instances: list[RankedRecommendation]
    middle_sequences: list[list[str]]

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "metrics": self.report.to_json_dict(),
            "transitions": {
                "labels": self.transitions.labels,
                "counts": self.transitions.counts.tolist(),
                "probabilities": self.transitions.probabilities.tolist(),
                "off_diagonal_share": self.transitions.off_diagonal_share(),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def run_replay(engine, dialogues: list[ReplayDialogue], mode: str, ks=DEFAULT_KS) -> ReplayResult:
    """Evaluate one mode over the whole dialogue set.

    Per annotated recommender turn: rank the item universe from the induced
    tree, score recall against gold, pool tree-leaf items for coverage, pair
    the realized utterance with the dataset utterance for the text metrics,
    and record the top middle genre for the transition analysis.
    """
    if not dialogues:
        raise ValueError("empty dialogue set")
    universe = engine.graph.item_ids()
    universe_set = set(universe)
    categories = set(engine.hierarchy.categories())
    instances: list[RankedRecommendation] = []
    hyps: list[str] = []
    refs: list[str] = []
    recommended: list[str] = []
    sequences: list[list[str]] = []
    for dlg in dialogues:
        session = engine.new_session(mode=mode, session_id=f"replay-{mode}-{dlg.dialogue_id}")
        seq: list[str] = []
        for t_idx, turn in enumerate(dlg.turns):
            if turn.role == ROLE_SEEKER:
                engine.observe_user(session, turn.text, extra_mentions=turn.item_mentions)
                continue
            if turn.gold_items:
                gold = frozenset(g for g in turn.gold_items if g in universe_set)
                if not gold:
                    log.warning(
                        "dialogue %s turn %d: no gold item resolves in the graph; skipped",
                        dlg.dialogue_id,
                        t_idx,
                    )
                else:
                    response = engine.respond(
                        session, forced_act=turn.gold_act or ACT_RECOMMEND
                    )
                    ranked = rank_items(response.tree, universe, engine.embeddings)
                    instances.append(
                        RankedRecommendation(
                            turn_ref=f"{dlg.dialogue_id}:{t_idx}",
                            ranked=tuple(ranked),
                            gold=gold,
                        )
                    )
                    recommended.extend(
                        leaf.payload
                        for leaf in response.tree.leaves()
                        if leaf.payload in universe_set
                    )
                    hyps.append(response.text)
                    refs.append(turn.text)
                    if response.tree.middles:
                        top_mid = response.tree.middles[0].payload
                        if top_mid in categories:
                            seq.append(top_mid)
            engine.observe_system(session, turn.text, mentions=turn.item_mentions)
        if seq:
            sequences.append(seq)
    if not instances:
        raise ValueError("no annotated recommendation turns to score")
    report = MetricsReport(
        recall={k: recall_at_k(instances, k) for k in ks},
        coverage=coverage(recommended, universe_set),
        bleu=bleu(hyps, refs),
        distinct={n: distinct_n(hyps, n) for n in (1, 2, 3)},
        f1=sum(token_f1(h, r) for h, r in zip(hyps, refs)) / len(hyps),
        sample_counts={
            "dialogues": len(dialogues),
            "scored_turns": len(instances),
            "recommendations": len(recommended),
        },
    )
    transitions = transition_matrix(sequences, labels=engine.hierarchy.categories())
    return ReplayResult(
        mode=mode,
        report=report,
        transitions=transitions,
        instances=instances,
        middle_sequences=sequences,
    )


def run_both(engine, dialogues: list[ReplayDialogue], ks=DEFAULT_KS) -> dict[str, ReplayResult]:
    """Baseline and hierarchical over identical inputs (independent sessions)."""
    return {
        "baseline": run_replay(engine, dialogues, "baseline", ks),
        "hierarchical": run_replay(engine, dialogues, "hierarchical", ks),
    }


def both_to_json(results: dict[str, ReplayResult]) -> str:
    payload = {mode: res.to_json_dict() for mode, res in results.items()}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
