"""Relational knowledge graph and the genre->item hierarchy built on top of it.

The graph is loaded from a line-oriented text file and is immutable after
construction, so it can be shared freely between sessions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

KIND_ITEM = "Item"
KIND_CATEGORY = "Category"
KIND_ATTRIBUTE = "Attribute"
KIND_CONCEPT = "Concept"
ENTITY_KINDS = (KIND_ITEM, KIND_CATEGORY, KIND_ATTRIBUTE, KIND_CONCEPT)

ACT_RECOMMEND = "Recommend"
ACT_QUERY = "Query"
ACT_CHAT = "Chat"


class KnowledgeFileError(ValueError):
    """Raised when a knowledge file cannot be parsed or violates graph invariants."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    kind: str
    description: str = ""


@dataclass(frozen=True)
class RelationTriple:
    subject: str
    predicate: str
    object: str


class KnowledgeGraph:
    """Entities plus deduplicated typed triples, indexed for neighbor lookup."""

    def __init__(self, entities: list[Entity], triples: list[RelationTriple]):
        self.entities: dict[str, Entity] = {}
        for ent in entities:
            if ent.id in self.entities:
                raise KnowledgeFileError(f"duplicate entity id {ent.id!r}")
            self.entities[ent.id] = ent
        seen: set[tuple[str, str, str]] = set()
        self.triples: list[RelationTriple] = []
        for t in triples:
            for eid in (t.subject, t.object):
                if eid not in self.entities:
                    raise KnowledgeFileError(
                        f"triple ({t.subject}, {t.predicate}, {t.object}) references unknown id {eid!r}"
                    )
            key = (t.subject, t.predicate, t.object)
            if key in seen:
                continue
            seen.add(key)
            self.triples.append(t)
        # adjacency is exactly the triple set re-indexed by (subject, predicate)
        self._adjacency: dict[tuple[str, str], set[str]] = {}
        self._incoming: dict[str, set[str]] = {}
        for t in self.triples:
            self._adjacency.setdefault((t.subject, t.predicate), set()).add(t.object)
            self._incoming.setdefault(t.object, set()).add(t.subject)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self.entities

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise KeyError(f"unknown entity id {entity_id!r}") from None

    def neighbors(self, entity_id: str, predicate: str) -> set[str]:
        """Objects of all ``(entity_id, predicate, *)`` triples; empty set if none."""
        self.entity(entity_id)
        return set(self._adjacency.get((entity_id, predicate), set()))

    def neighbors_all(self, entity_id: str) -> set[str]:
        """Union of outgoing neighbors over every predicate."""
        self.entity(entity_id)
        out: set[str] = set()
        for (subj, _), objs in self._adjacency.items():
            if subj == entity_id:
                out |= objs
        return out

    def adjacent(self, entity_id: str) -> set[str]:
        """Neighbors in either direction (subjects pointing at the entity included)."""
        return self.neighbors_all(entity_id) | set(self._incoming.get(entity_id, set()))

    def predicates(self) -> list[str]:
        return sorted({t.predicate for t in self.triples})

    def ids_of_kind(self, kind: str) -> list[str]:
        return sorted(e.id for e in self.entities.values() if e.kind == kind)

    def item_ids(self) -> list[str]:
        return self.ids_of_kind(KIND_ITEM)


@dataclass
class Hierarchy:
    """Single-parent item/category partition: each item under exactly one category."""

    category_of: dict[str, str] = field(default_factory=dict)
    members_of: dict[str, list[str]] = field(default_factory=dict)

    def categories(self) -> list[str]:
        return sorted(self.members_of)

    def items(self) -> list[str]:
        return sorted(self.category_of)

    def node_ids(self) -> list[str]:
        return sorted(self.category_of) + sorted(self.members_of)


def load_graph(path) -> KnowledgeGraph:
    """Parse a knowledge file.

    Format, one record per line, tab separated::

        E<TAB>id<TAB>kind<TAB>name[<TAB>description]
        T<TAB>subject<TAB>predicate<TAB>object

    ``#`` starts a comment. Blank lines are ignored.
    """
    entities: list[Entity] = []
    triples: list[RelationTriple] = []
    kind_map = {k.lower(): k for k in ENTITY_KINDS}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            tag = parts[0]
            if tag == "E":
                if len(parts) < 4:
                    raise KnowledgeFileError("entity record needs id, kind, name", lineno)
                _, eid, kind, name = parts[:4]
                desc = parts[4] if len(parts) > 4 else ""
                canonical = kind_map.get(kind.strip().lower())
                if canonical is None:
                    raise KnowledgeFileError(
                        f"unknown entity kind {kind!r} (expected one of {', '.join(ENTITY_KINDS)})",
                        lineno,
                    )
                if any(e.id == eid for e in entities):
                    raise KnowledgeFileError(f"duplicate entity id {eid!r}", lineno)
                entities.append(Entity(id=eid, name=name.strip(), kind=canonical, description=desc))
            elif tag == "T":
                if len(parts) != 4:
                    raise KnowledgeFileError("triple record needs subject, predicate, object", lineno)
                _, subj, pred, obj = parts
                triples.append(RelationTriple(subject=subj, predicate=pred, object=obj))
            else:
                raise KnowledgeFileError(f"unknown record tag {tag!r}", lineno)
    if not entities:
        raise KnowledgeFileError("no entities")
    return KnowledgeGraph(entities, triples)


def save_graph(graph: KnowledgeGraph, path) -> None:
    """Write a graph back in the knowledge file format (round-trips with load_graph)."""
    with open(path, "w", encoding="utf-8") as fh:
        for eid in sorted(graph.entities):
            ent = graph.entities[eid]
            row = ["E", ent.id, ent.kind, ent.name]
            if ent.description:
                row.append(ent.description)
            fh.write("\t".join(row) + "\n")
        for t in sorted(graph.triples, key=lambda t: (t.subject, t.predicate, t.object)):
            fh.write("\t".join(["T", t.subject, t.predicate, t.object]) + "\n")


def build_hierarchy(graph: KnowledgeGraph, category_predicate: str) -> Hierarchy:
    """Partition Item entities under Category entities via ``category_predicate``.

    Every item must carry exactly one category triple; zero or multiple
    memberships are hard errors. Member lists are ordered by entity id.
    """
    hierarchy = Hierarchy()
    for item_id in graph.item_ids():
        cats = sorted(graph.neighbors(item_id, category_predicate))
        cats = [c for c in cats if graph.entity(c).kind == KIND_CATEGORY]
        if not cats:
            raise KnowledgeFileError(f"item {item_id!r} has no {category_predicate!r} category")
        if len(cats) > 1:
            raise KnowledgeFileError(
                f"item {item_id!r} belongs to multiple categories: {', '.join(cats)}"
            )
        hierarchy.category_of[item_id] = cats[0]
        hierarchy.members_of.setdefault(cats[0], []).append(item_id)
    for members in hierarchy.members_of.values():
        members.sort()
    return hierarchy


def candidate_entities(
    graph: KnowledgeGraph,
    act: str,
    layer: str,
    parents: set[str],
    hierarchy: Hierarchy | None = None,
) -> list[str]:
    """Entity ids eligible for one tree layer under one dialog act, in id order.

    ``parents`` holds the mentioned-entity set for the middle layer and the
    selected middle-node id(s) for the leaf layer.
    """
    if layer not in ("middle", "leaf"):
        raise ValueError(f"layer must be 'middle' or 'leaf', got {layer!r}")
    if act == ACT_RECOMMEND:
        if layer == "middle":
            out: set[str] = set()
            for eid in parents:
                ent = graph.entity(eid)
                if ent.kind in (KIND_ATTRIBUTE, KIND_CATEGORY):
                    # a directly mentioned attribute or genre is itself a candidate
                    out.add(eid)
                elif ent.kind == KIND_ITEM:
                    for nb in graph.adjacent(eid):
                        if graph.entity(nb).kind in (KIND_ATTRIBUTE, KIND_CATEGORY):
                            out.add(nb)
            return sorted(out)
        out = set()
        for parent in parents:
            for nb in graph.adjacent(parent):
                if graph.entity(nb).kind == KIND_ITEM:
                    out.add(nb)
        return sorted(out)
    if act == ACT_QUERY:
        if layer == "middle":
            return graph.ids_of_kind(KIND_CONCEPT)
        return sorted(graph.ids_of_kind(KIND_ATTRIBUTE) + graph.ids_of_kind(KIND_CATEGORY))
    if act == ACT_CHAT:
        if layer == "middle":
            for eid in parents:
                graph.entity(eid)
            return sorted(parents)
        return sorted(graph.entities)
    raise ValueError(f"unknown dialog act {act!r}")
