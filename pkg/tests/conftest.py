"""Shared fixtures: hand-built graphs, a two-genre engine bundle with
axis-engineered word vectors, and the synthetic replay corpus."""

import pytest

from convrec.config import load_config
from convrec.engine import build_engine
from convrec.knowledge import Entity, KnowledgeGraph, RelationTriple, build_hierarchy
from convrec.synth import write_bundle

# Three-turn script: an opening genre statement, an actor follow-up, and a
# drift into a second genre expressed through a synonym ("scary") plus two
# title mentions. Used by the genre-shift acceptance scenario and the service
# equivalence tests.
SHIFT_SCRIPT = [
    "i love to watch funny movies",
    "yes, i love adam sandler",
    "just watched the mask last night! there is a new one Son of the Mask. "
    "i like some scary movie",
]

SHIFT_GRAPH = """\
# two-genre movie world
E\tc_comedy\tCategory\tComedy
E\tc_horror\tCategory\tHorror
E\ti_click\tItem\tClick\tcomic
E\ti_mask\tItem\tThe Mask\tcomic
E\ti_sonmask\tItem\tSon of the Mask\tcomic
E\ti_waterboy\tItem\tThe Waterboy\tcomic
E\ti_leprechaun\tItem\tLeprechaun\tspooky
E\ti_tucker\tItem\tTucker and Dale vs. Evil\tspooky
E\ta_sandler\tAttribute\tAdam Sandler\tadam sandler
E\tn_genre\tConcept\tgenre
T\ti_click\thas_genre\tc_comedy
T\ti_mask\thas_genre\tc_comedy
T\ti_sonmask\thas_genre\tc_comedy
T\ti_waterboy\thas_genre\tc_comedy
T\ti_leprechaun\thas_genre\tc_horror
T\ti_tucker\thas_genre\tc_horror
T\ti_click\tstarring\ta_sandler
T\ti_waterboy\tstarring\ta_sandler
"""

# Axis layout: axis 0 = comedy words, axis 1 = horror words, axis 2 = the
# verb "watch" (dilutes genre axes in mixed turns), axis 3 = the actor.
# Comedy words carry much larger magnitude than horror words, so a single
# blended interest vector stays dominated by the comedy component even after
# the horror turn; the per-genre accumulated scores are magnitude-blind
# (cosine) and flip.
SHIFT_VECTORS = """\
7 4
funny 1.600000 0.000000 0.000000 0.000000
comic 1.600000 0.000000 0.000000 0.000000
scary 0.000000 0.500000 0.000000 0.000000
spooky 0.000000 0.500000 0.000000 0.000000
watch 0.000000 0.000000 0.800000 0.000000
adam 0.000000 0.000000 0.000000 0.700000
sandler 0.000000 0.000000 0.000000 0.700000
"""

SHIFT_ALIASES = "funny movies\tc_comedy\nscary movie\tc_horror\n"

SHIFT_STOPWORDS = "i\nto\na\nthe\nsome\nyes\n"


def write_shift_bundle(root):
    """Write the two-genre bundle into `root` and return the config path."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "graph.txt").write_text(SHIFT_GRAPH, encoding="utf-8")
    (root / "vectors.txt").write_text(SHIFT_VECTORS, encoding="utf-8")
    (root / "aliases.tsv").write_text(SHIFT_ALIASES, encoding="utf-8")
    (root / "stopwords.txt").write_text(SHIFT_STOPWORDS, encoding="utf-8")
    (root / "config.cfg").write_text(
        "paths.graph = graph.txt\n"
        "paths.word_vectors = vectors.txt\n"
        "paths.aliases = aliases.tsv\n"
        "paths.stopwords = stopwords.txt\n"
        "embedding.dim = 4\n"
        "mode = hierarchical\n",
        encoding="utf-8",
    )
    return root / "config.cfg"


@pytest.fixture(scope="session")
def shift_bundle(tmp_path_factory):
    return write_shift_bundle(tmp_path_factory.mktemp("shift") / "bundle")


@pytest.fixture(scope="session")
def shift_engine(shift_bundle):
    return build_engine(load_config(shift_bundle))


@pytest.fixture(scope="session")
def synth_config_path(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "bundle"
    return write_bundle(out, n_dialogues=50, genres_n=6, items_per_genre=10, seed=0)


def make_small_graph() -> KnowledgeGraph:
    """Five entities, four triples: one genre, two of its titles, one shared
    actor, one generic concept."""
    entities = [
        Entity(id="c1", name="Comedy", kind="Category"),
        Entity(id="i1", name="Click", kind="Item", description="comedy film"),
        Entity(id="i2", name="The Waterboy", kind="Item", description="comedy film"),
        Entity(id="a1", name="Adam Sandler", kind="Attribute"),
        Entity(id="n1", name="genre", kind="Concept"),
    ]
    triples = [
        RelationTriple("i1", "has_genre", "c1"),
        RelationTriple("i2", "has_genre", "c1"),
        RelationTriple("i1", "starring", "a1"),
        RelationTriple("i2", "starring", "a1"),
    ]
    return KnowledgeGraph(entities, triples)


@pytest.fixture
def small_graph():
    return make_small_graph()


@pytest.fixture
def small_hierarchy(small_graph):
    return build_hierarchy(small_graph, "has_genre")
