"""Synthetic evaluation bundle: a small genre/title world plus scripted
dialogues with annotated recommendation turns.

Each seeker names one genre outright early on, then drifts into a second
genre expressed only through synonym words (never the genre's entity name).
A mention-driven recommender therefore never acquires the second genre as a
candidate, while utterance-similarity tracking picks it up — which is exactly
the contrast the replay harness is meant to measure.

Word vectors are axis-engineered: every genre owns one axis (its name and two
synonyms point along it) and every title owns a private "flavor" axis used in
its description and title. Flavor words dropped into seeker turns steer which
titles rank best, so different dialogues surface different titles.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

GENRES = ["comedy", "horror", "action", "drama", "scifi", "romance"]

SYNONYMS = {
    "comedy": ["funny", "hilarious"],
    "horror": ["scary", "creepy"],
    "action": ["explosive", "thrilling"],
    "drama": ["emotional", "heartfelt"],
    "scifi": ["futuristic", "galactic"],
    "romance": ["romantic", "tender"],
}

FLAVORS = {
    "comedy": ["slapstick", "parody", "satire", "deadpan", "screwball",
               "mockumentary", "bumbling", "prankish", "farce", "quirky"],
    "horror": ["haunted", "gory", "undead", "occult", "slasher",
               "nightmare", "cursed", "demonic", "eerie", "macabre"],
    "action": ["heist", "chase", "ninja", "commando", "gunfight",
               "stunts", "rampage", "vendetta", "blockade", "siege"],
    "drama": ["custody", "verdict", "betrayal", "redemption", "grief",
              "scandal", "legacy", "divorce", "memoir", "reckoning"],
    "scifi": ["android", "wormhole", "cyborg", "nebula", "terraform",
              "quantum", "starship", "clone", "asteroid", "dystopia"],
    "romance": ["wedding", "courtship", "heartbreak", "serenade", "elopement",
                "valentine", "longing", "devotion", "flame", "proposal"],
}

TITLE_SUFFIX = {
    "comedy": "Show",
    "horror": "House",
    "action": "Mission",
    "drama": "Letters",
    "scifi": "Voyage",
    "romance": "Promise",
}


def _item_id(genre: str, k: int) -> str:
    return f"m_{genre}_{k:02d}"


def _cat_id(genre: str) -> str:
    return f"g_{genre}"


def build_world(genres_n: int = 6, items_per_genre: int = 10):
    """Entities, triples, word vectors, and the marker map for the bundle."""
    if not (1 <= genres_n <= len(GENRES)):
        raise ValueError(f"genres_n must be in 1..{len(GENRES)}")
    if not (1 <= items_per_genre <= 10):
        raise ValueError("items_per_genre must be in 1..10")
    genres = GENRES[:genres_n]
    dim = genres_n + genres_n * items_per_genre
    entity_lines: list[str] = []
    triple_lines: list[str] = []
    vectors: dict[str, list[float]] = {}
    movie_map: dict[str, str] = {}

    def axis(idx: int) -> list[float]:
        v = [0.0] * dim
        v[idx] = 1.0
        return v

    for g_idx, genre in enumerate(genres):
        entity_lines.append(f"E\t{_cat_id(genre)}\tCategory\t{genre}")
        vectors[genre] = axis(g_idx)
        for syn in SYNONYMS[genre]:
            vectors[syn] = axis(g_idx)
        for k in range(items_per_genre):
            flavor = FLAVORS[genre][k]
            f_axis = genres_n + g_idx * items_per_genre + k
            vectors[flavor] = axis(f_axis)
            iid = _item_id(genre, k)
            name = f"{flavor.title()} {TITLE_SUFFIX[genre]}"
            desc = f"{genre} {flavor}"
            entity_lines.append(f"E\t{iid}\tItem\t{name}\t{desc}")
            triple_lines.append(f"T\t{iid}\thas_genre\t{_cat_id(genre)}")
            movie_map[str(100 + g_idx * items_per_genre + k)] = iid
    entity_lines.append("E\tn_genre\tConcept\tgenre")
    return genres, entity_lines, triple_lines, vectors, movie_map, dim


def _marker_for(genre: str, k: int, genres: list[str], items_per_genre: int) -> str:
    return str(100 + genres.index(genre) * items_per_genre + k)


def build_dialogues(
    genres: list[str],
    items_per_genre: int,
    n_dialogues: int,
    seed: int,
) -> list[dict]:
    """Scripted seeker/recommender conversations in the replay JSON format.

    The first half of the genre list supplies the openly named genre, the
    second half the drift genre, so a mention-driven run can never recommend
    outside the first half.
    """
    if len(genres) < 2:
        raise ValueError("need at least two genres for a two-interest script")
    rng = random.Random(seed)
    named = genres[: max(1, len(genres) // 2)]
    drifted = genres[len(named):] or genres[:1]
    convs = []
    openers = [
        "hi i want something {genre} tonight maybe {flavor}",
        "looking for a {genre} pick, something {flavor} perhaps",
        "i want a {genre} one, {flavor} if possible",
    ]
    followups = [
        "{syn} and {flavor} please",
        "more {syn} stuff, {flavor} works too",
        "keep it {syn}, a bit {flavor} even",
    ]
    shifts = [
        "actually i feel like {syn} stuff now",
        "on second thought give me something {syn}",
        "hmm now i want a {syn} one instead",
    ]
    confirms = [
        "{syn2} and {flavor} {syn}",
        "yes {syn2} please, {flavor} and {syn}",
        "something {syn2}, {flavor}, very {syn}",
    ]
    for i in range(n_dialogues):
        a = named[i % len(named)]
        b = drifted[i % len(drifted)]
        k1 = (i * 7) % items_per_genre
        step = (3 % items_per_genre) or 1
        k2 = (k1 + step) % items_per_genre if items_per_genre > 1 else k1
        bk = 1 + (i % (items_per_genre - 1)) if items_per_genre > 1 else 0
        fa1, fa2 = FLAVORS[a][k1], FLAVORS[a][k2]
        fb = FLAVORS[b][bk]
        a_syn = SYNONYMS[a][i % 2]
        b_syn1, b_syn2 = SYNONYMS[b][i % 2], SYNONYMS[b][(i + 1) % 2]
        m_a1 = _marker_for(a, k1, genres, items_per_genre)
        m_a2 = _marker_for(a, k2, genres, items_per_genre)
        m_b0 = _marker_for(b, 0, genres, items_per_genre)
        m_bk = _marker_for(b, bk, genres, items_per_genre)
        pick = lambda options: options[rng.randrange(len(options))]  # noqa: E731
        messages = [
            {"senderWorkerId": 0, "text": pick(openers).format(genre=a, flavor=fa1)},
            {"senderWorkerId": 1, "text": f"have you seen @{m_a1} ?"},
            {"senderWorkerId": 0, "text": pick(followups).format(syn=a_syn, flavor=fa2)},
            {"senderWorkerId": 1, "text": f"then you could try @{m_a2} ."},
            {"senderWorkerId": 0, "text": pick(shifts).format(syn=b_syn1)},
            {"senderWorkerId": 1, "text": f"maybe @{m_b0} ?"},
            {"senderWorkerId": 0, "text": pick(confirms).format(syn2=b_syn2, flavor=fb, syn=b_syn1)},
            {"senderWorkerId": 1, "text": f"sure, @{m_bk} is a good one ."},
        ]
        names = {
            m: f"{FLAVORS[g][k].title()} {TITLE_SUFFIX[g]}"
            for m, (g, k) in {
                m_a1: (a, k1),
                m_a2: (a, k2),
                m_b0: (b, 0),
                m_bk: (b, bk),
            }.items()
        }
        convs.append(
            {
                "conversationId": str(9000 + i),
                "initiatorWorkerId": 0,
                "respondentWorkerId": 1,
                "messages": messages,
                "movieMentions": names,
            }
        )
    return convs


def write_bundle(
    out_dir,
    n_dialogues: int = 50,
    genres_n: int = 6,
    items_per_genre: int = 10,
    seed: int = 0,
) -> Path:
    """Write graph, vectors, movie map, dialogues, and config; returns the
    config path, ready for `replay --config <path> --both`."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    genres, entity_lines, triple_lines, vectors, movie_map, dim = build_world(
        genres_n, items_per_genre
    )

    graph_path = out / "graph.txt"
    with open(graph_path, "w", encoding="utf-8") as fh:
        fh.write("# synthetic genre/title world\n")
        for line in entity_lines:
            fh.write(line + "\n")
        for line in triple_lines:
            fh.write(line + "\n")

    vec_path = out / "vectors.txt"
    with open(vec_path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(vectors)} {dim}\n")
        for token in sorted(vectors):
            comps = " ".join(f"{x:.6f}" for x in vectors[token])
            fh.write(f"{token} {comps}\n")

    map_path = out / "movie_map.csv"
    with open(map_path, "w", encoding="utf-8") as fh:
        fh.write("marker_id,entity_id\n")
        for marker in sorted(movie_map, key=int):
            fh.write(f"{marker},{movie_map[marker]}\n")

    dlg_path = out / "dialogues.jsonl"
    convs = build_dialogues(genres, items_per_genre, n_dialogues, seed)
    with open(dlg_path, "w", encoding="utf-8") as fh:
        for conv in convs:
            fh.write(json.dumps(conv, sort_keys=True) + "\n")

    cfg_path = out / "config.cfg"
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(
            "\n".join(
                [
                    "# synthetic bundle",
                    "paths.graph = graph.txt",
                    "paths.word_vectors = vectors.txt",
                    "paths.movie_map = movie_map.csv",
                    "hierarchy.category_predicate = has_genre",
                    f"embedding.dim = {dim}",
                    "mode = hierarchical",
                    f"seed = {seed}",
                ]
            )
            + "\n"
        )
    return cfg_path
