"""Import ReDial-format dialogue files for replay evaluation.

ReDial is JSON-lines: one conversation per line with `messages`,
`movieMentions`, and the worker ids that distinguish the seeker (initiator)
from the recommender. Movie markers (`@12345`) are resolved through a
marker->entity map; text normalization is lowercase + whitespace collapse.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

_MARKER = re.compile(r"@(\d+)")

ROLE_SEEKER = "seeker"
ROLE_RECOMMENDER = "recommender"


@dataclass
class ReplayTurn:
    role: str
    text: str  # normalized, markers replaced by item names
    raw_text: str  # original text, markers intact
    item_mentions: list[str] = field(default_factory=list)  # resolved entity ids
    gold_items: list[str] = field(default_factory=list)  # annotated recs (recommender turns)
    gold_act: str | None = None


@dataclass
class ReplayDialogue:
    dialogue_id: str
    turns: list[ReplayTurn]
    movie_mentions: dict[str, str] = field(default_factory=dict)  # marker -> display name


@dataclass
class ImportResult:
    dialogues: list[ReplayDialogue]
    skipped_markers: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


def load_movie_map(path) -> dict[str, str]:
    """CSV `marker_id,entity_id`; an optional header row is skipped."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if lineno == 1 and line.lower().replace(" ", "") == "marker_id,entity_id":
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"{path} line {lineno}: expected marker_id,entity_id")
            mapping[parts[0].strip()] = parts[1].strip()
    return mapping


def import_redial(path, movie_map: dict[str, str]) -> ImportResult:
    """Parse conversations, resolving `@<digits>` markers through movie_map.

    Unresolvable markers don't kill the dialogue: the marker is swapped for its
    display name (when `movieMentions` has one) and logged in the skip report.
    """
    dialogues: list[ReplayDialogue] = []
    skipped: list[tuple[str, str]] = []
    warnings: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                conv = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path} line {lineno}: malformed JSON ({exc.msg})") from exc
            dialogues.append(_parse_conversation(conv, movie_map, skipped, warnings, lineno))
    if not dialogues:
        raise ValueError(f"{path}: no conversations")
    return ImportResult(dialogues=dialogues, skipped_markers=skipped, warnings=warnings)


def _parse_conversation(conv, movie_map, skipped, warnings, lineno) -> ReplayDialogue:
    did = str(conv.get("conversationId", f"line{lineno}"))
    initiator = conv.get("initiatorWorkerId")
    mentions_names = {str(k): str(v) for k, v in (conv.get("movieMentions") or {}).items()}
    turns: list[ReplayTurn] = []
    distinct_movies: set[str] = set()
    for msg in conv.get("messages", []):
        raw = str(msg.get("text", ""))
        role = ROLE_SEEKER if msg.get("senderWorkerId") == initiator else ROLE_RECOMMENDER
        resolved: list[str] = []

        def _sub(match: re.Match) -> str:
            marker = match.group(1)
            distinct_movies.add(marker)
            entity_id = movie_map.get(marker)
            if entity_id is None:
                skipped.append((did, marker))
                return mentions_names.get(marker, match.group(0))
            resolved.append(entity_id)
            return mentions_names.get(marker, entity_id)

        text = _normalize(_MARKER.sub(_sub, raw))
        turns.append(
            ReplayTurn(
                role=role,
                text=text,
                raw_text=raw,
                item_mentions=resolved,
                gold_items=list(dict.fromkeys(resolved)) if role == ROLE_RECOMMENDER else [],
                gold_act=msg.get("act"),
            )
        )
    if len(distinct_movies) < 4:
        msg = f"conversation {did}: only {len(distinct_movies)} distinct movies mentioned (< 4)"
        warnings.append(msg)
        log.warning(msg)
    return ReplayDialogue(dialogue_id=did, turns=turns, movie_mentions=mentions_names)


def export_redial(dialogues: list[ReplayDialogue], path) -> None:
    """Write dialogues back as ReDial JSON-lines (round-trips with import_redial)."""
    with open(path, "w", encoding="utf-8") as fh:
        for dlg in dialogues:
            conv = {
                "conversationId": dlg.dialogue_id,
                "initiatorWorkerId": 0,
                "respondentWorkerId": 1,
                "messages": [
                    {
                        "senderWorkerId": 0 if t.role == ROLE_SEEKER else 1,
                        "text": t.raw_text,
                        **({"act": t.gold_act} if t.gold_act else {}),
                    }
                    for t in dlg.turns
                ],
                "movieMentions": dlg.movie_mentions,
            }
            fh.write(json.dumps(conv, sort_keys=True) + "\n")
