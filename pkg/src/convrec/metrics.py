"""Evaluation metrics: retrieval recall, catalogue coverage, lexical diversity,
corpus BLEU, unigram F1, and the genre-to-genre transition matrix."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RankedRecommendation:
    """One scored turn: the system's ranking against the annotated gold items."""

    turn_ref: str
    ranked: tuple[str, ...]
    gold: frozenset[str]

    def __post_init__(self):
        if len(set(self.ranked)) != len(self.ranked):
            raise ValueError(f"{self.turn_ref}: ranked list contains duplicates")
        if not self.gold:
            raise ValueError(f"{self.turn_ref}: gold set empty")


def recall_at_k(instances: list[RankedRecommendation], k: int) -> float:
    """Mean over instances of |gold intersect top-k| / |gold|."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not instances:
        raise ValueError("no instances to score")
    total = 0.0
    for inst in instances:
        top = set(inst.ranked[:k])
        total += len(top & inst.gold) / len(inst.gold)
    return total / len(instances)


def coverage(all_recommended, universe) -> float:
    """Unique recommended items over the size of the item set."""
    universe = set(universe)
    if not universe:
        raise ValueError("empty item universe")
    unique = set(all_recommended)
    outside = unique - universe
    if outside:
        raise ValueError(f"recommendations outside the item universe: {sorted(outside)[:5]}")
    return len(unique) / len(universe)


def _ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def distinct_n(texts: list[str], n: int) -> float:
    """Unique/total n-grams over the whitespace-tokenized concatenated corpus.

    The corpus is treated as one token stream, so n-grams may span utterance
    boundaries; with a single text this matches the usual definition.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = " ".join(texts).split()
    grams = _ngrams(tokens, n)
    if not grams:
        return 0.0
    return len(set(grams)) / len(grams)


def bleu(hypotheses: list[str], references: list[str], max_order: int = 4) -> float:
    """Corpus BLEU with uniform weights, brevity penalty, and add-one smoothing
    applied to any order whose clipped match count is zero."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference count mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise ValueError("no hypothesis/reference pairs")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h_tokens = hyp.split()
        r_tokens = ref.split()
        hyp_len += len(h_tokens)
        ref_len += len(r_tokens)
        for n in range(1, max_order + 1):
            h_counts = Counter(_ngrams(h_tokens, n))
            r_counts = Counter(_ngrams(r_tokens, n))
            totals[n - 1] += sum(h_counts.values())
            matches[n - 1] += sum(min(c, r_counts[g]) for g, c in h_counts.items())
    if hyp_len == 0:
        return 0.0
    log_precision = 0.0
    for n in range(max_order):
        if totals[n] == 0:
            continue  # no n-grams of this order exist at all; drop the factor
        if matches[n] > 0:
            p = matches[n] / totals[n]
        else:
            p = 1.0 / (totals[n] + 1)
        log_precision += math.log(p) / max_order
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * math.exp(log_precision)


def token_f1(hypothesis: str, reference: str) -> float:
    """Harmonic mean of unigram precision/recall over token multisets."""
    h = Counter(hypothesis.split())
    r = Counter(reference.split())
    if not h or not r:
        return 0.0
    overlap = sum((h & r).values())
    if overlap == 0:
        return 0.0
    precision = overlap / sum(h.values())
    recall = overlap / sum(r.values())
    return 2 * precision * recall / (precision + recall)


@dataclass
class TransitionMatrix:
    """Row-stochastic matrix of consecutive top-genre transitions."""

    labels: list[str]
    counts: np.ndarray
    probabilities: np.ndarray

    def off_diagonal_share(self) -> float:
        """Fraction of all transitions that change genre."""
        total = float(self.counts.sum())
        if total == 0.0:
            return 0.0
        return float(total - np.trace(self.counts)) / total

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for i, label in enumerate(self.labels):
            row = ",".join(f"{self.probabilities[i, j]:.6f}" for j in range(len(self.labels)))
            lines.append(f"{label},{row}")
        return "\n".join(lines) + "\n"


def transition_matrix(
    sequences: list[list[str]], labels: list[str] | None = None
) -> TransitionMatrix:
    """Pool consecutive (prev, next) pairs across dialogues and row-normalize."""
    if labels is None:
        labels = sorted({cid for seq in sequences for cid in seq})
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=float)
    for seq in sequences:
        for prev, nxt in zip(seq, seq[1:]):
            if prev not in index or nxt not in index:
                raise ValueError(f"unknown category id in sequence: {prev!r} or {nxt!r}")
            counts[index[prev], index[nxt]] += 1.0
    probs = np.zeros_like(counts)
    for i in range(len(labels)):
        row_sum = counts[i].sum()
        if row_sum > 0:
            probs[i] = counts[i] / row_sum
    return TransitionMatrix(labels=list(labels), counts=counts, probabilities=probs)


@dataclass
class MetricsReport:
    recall: dict[int, float]
    coverage: float
    bleu: float
    distinct: dict[int, float]
    f1: float
    sample_counts: dict[str, int] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "recall": {str(k): self.recall[k] for k in sorted(self.recall)},
            "coverage": self.coverage,
            "bleu": self.bleu,
            "bleu_x100": self.bleu * 100.0,
            "distinct": {str(n): self.distinct[n] for n in sorted(self.distinct)},
            "f1": self.f1,
            "sample_counts": dict(sorted(self.sample_counts.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def format_table(self, title: str = "metrics") -> str:
        rows = [(f"R@{k}", self.recall[k]) for k in sorted(self.recall)]
        rows.append(("Cov.", self.coverage))
        rows.append(("BLEU", self.bleu))
        rows.extend((f"dist-{n}", self.distinct[n]) for n in sorted(self.distinct))
        rows.append(("F1", self.f1))
        width = max(len(name) for name, _ in rows)
        lines = [title]
        lines.extend(f"  {name.ljust(width)}  {value:.4f}" for name, value in rows)
        return "\n".join(lines)


def side_by_side(a: MetricsReport, b: MetricsReport, name_a: str, name_b: str) -> str:
    """Two-column comparison with deltas, one metric per row."""

    def rows(rep: MetricsReport) -> list[tuple[str, float]]:
        out = [(f"R@{k}", rep.recall[k]) for k in sorted(rep.recall)]
        out.append(("Cov.", rep.coverage))
        out.append(("BLEU", rep.bleu))
        out.extend((f"dist-{n}", rep.distinct[n]) for n in sorted(rep.distinct))
        out.append(("F1", rep.f1))
        return out

    rows_a, rows_b = rows(a), rows(b)
    width = max(len(name) for name, _ in rows_a)
    header = f"  {'metric'.ljust(width)}  {name_a:>12}  {name_b:>12}  {'delta':>12}"
    lines = [header]
    for (name, va), (_, vb) in zip(rows_a, rows_b):
        lines.append(f"  {name.ljust(width)}  {va:12.4f}  {vb:12.4f}  {vb - va:+12.4f}")
    return "\n".join(lines)
