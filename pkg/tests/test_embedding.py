"""Vector machinery: loaders, text/node vectorization, the relational graph
convolution against a dense reference implementation, and cosine."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from convrec.embedding import (
    NodeEmbeddingTable,
    RgcnParameters,
    TokenFilter,
    WordEmbeddingTable,
    build_node_table,
    category_node_vector,
    cosine,
    hashed_word_vector,
    item_node_vector,
    load_pos_lexicon,
    load_stopwords,
    load_word_vectors,
    normalize,
    rgcn_embedding_table,
    rgcn_entity_embedding,
    save_word_vectors,
    text_vector,
    tokenize,
)
from convrec.knowledge import Entity, KnowledgeGraph, RelationTriple, build_hierarchy

PASS_ALL = TokenFilter()


def table(**vecs):
    return WordEmbeddingTable({k: np.asarray(v, dtype=float) for k, v in vecs.items()})


class TestTokenize:
    def test_lowercase_and_punctuation(self):
        assert tokenize("The Mask! (1994)") == ["the", "mask", "1994"]

    def test_filter_drops_stopwords(self):
        f = TokenFilter(stopwords=frozenset({"the", "a"}))
        assert f(["the", "great", "a", "escape"]) == ["great", "escape"]

    def test_pos_lexicon_keeps_nouns_and_adjectives(self, tmp_path):
        p = tmp_path / "pos.tsv"
        p.write_text("movie\tNOUN\nfunny\tADJ\nwatch\tVERB\n", encoding="utf-8")
        f = TokenFilter(pos=load_pos_lexicon(p))
        assert f(["funny", "movie", "watch", "unlisted"]) == ["funny", "movie"]

    def test_stopword_loader_skips_comments(self, tmp_path):
        p = tmp_path / "stop.txt"
        p.write_text("# header\nThe\n\na\n", encoding="utf-8")
        assert load_stopwords(p) == frozenset({"the", "a"})


class TestWordVectorIO:
    def test_well_formed_file(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("2 3\nfoo 1 2 3\nbar 0.5 0 -1\n", encoding="utf-8")
        t = load_word_vectors(p)
        assert len(t) == 2 and t.dim == 3
        assert np.allclose(t.get("FOO"), [1, 2, 3])

    def test_truncated_file(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("2 3\nfoo 1 2 3\n", encoding="utf-8")
        with pytest.raises(ValueError, match="declares 2"):
            load_word_vectors(p)

    def test_wrong_component_count(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("1 3\nfoo 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="line 2"):
            load_word_vectors(p)

    def test_non_numeric_component(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("1 2\nfoo 1 x\n", encoding="utf-8")
        with pytest.raises(ValueError, match="non-numeric"):
            load_word_vectors(p)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "vec.txt"
        p.write_text("onlyone\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            load_word_vectors(p)

    def test_round_trip_to_six_places(self, tmp_path):
        t = table(foo=[0.1234564, -2.0], bar=[1e-7, 3.5])
        p = tmp_path / "vec.txt"
        save_word_vectors(t, p)
        again = load_word_vectors(p)
        for tok in ("foo", "bar"):
            assert np.allclose(again.get(tok), t.get(tok), atol=5e-7)
        # a second round trip is bit-identical: 6-decimal form is a fixed point
        p2 = tmp_path / "vec2.txt"
        save_word_vectors(again, p2)
        assert p.read_text() == p2.read_text()

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            WordEmbeddingTable({})

    def test_mixed_dims_rejected(self):
        with pytest.raises(ValueError, match="shapes"):
            table(a=[1.0], b=[1.0, 2.0])


class TestHashedVectors:
    def test_deterministic(self):
        assert np.array_equal(
            hashed_word_vector("comedy", 8, 42), hashed_word_vector("comedy", 8, 42)
        )

    def test_unit_norm(self):
        assert np.linalg.norm(hashed_word_vector("anything", 16, 7)) == pytest.approx(
            1.0, abs=1e-9
        )

    def test_distinct_tokens_differ(self):
        a = hashed_word_vector("comedy", 8, 42)
        b = hashed_word_vector("horror", 8, 42)
        assert not np.allclose(a, b)

    def test_seed_changes_vector(self):
        assert not np.allclose(
            hashed_word_vector("comedy", 8, 0), hashed_word_vector("comedy", 8, 1)
        )

    def test_dim_validated(self):
        with pytest.raises(ValueError):
            hashed_word_vector("x", 0)


class TestTextVector:
    def test_mean_of_two(self):
        t = table(funny=[1, 0], movies=[0, 1])
        tv = text_vector("funny movies", t, PASS_ALL)
        assert not tv.empty
        assert np.allclose(tv.values, [0.5, 0.5])

    def test_all_filtered_is_flagged_zero(self):
        t = table(funny=[1, 0])
        tv = text_vector("funny", t, TokenFilter(stopwords=frozenset({"funny"})))
        assert tv.empty
        assert np.all(tv.values == 0.0)

    def test_out_of_vocabulary_excluded(self):
        t = table(funny=[1, 0], movies=[0, 1])
        tv = text_vector("funny zorblax movies", t, PASS_ALL)
        assert np.allclose(tv.values, [0.5, 0.5])

    @given(st.permutations(["funny", "movies", "night"]))
    def test_token_order_irrelevant(self, toks):
        t = table(funny=[1, 0], movies=[0, 1], night=[2, 2])
        base = text_vector("funny movies night", t, PASS_ALL).values
        assert np.allclose(text_vector(" ".join(toks), t, PASS_ALL).values, base)


class TestNodeVectors:
    def test_item_vector_is_description_vector(self, small_graph):
        t = table(comedy=[1, 0], film=[0, 1])
        tv = item_node_vector("i1", small_graph, t, PASS_ALL)
        assert np.allclose(tv.values, [0.5, 0.5])

    def test_missing_description_flagged(self):
        g = KnowledgeGraph(
            [Entity("c", "C", "Category"), Entity("i", "I", "Item")],
            [RelationTriple("i", "has_genre", "c")],
        )
        t = table(word=[1.0, 0.0])
        assert item_node_vector("i", g, t, PASS_ALL).empty

    def test_category_mean_of_two(self):
        items = NodeEmbeddingTable(
            {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])}, set(), 2
        )
        h = build_hierarchy(
            KnowledgeGraph(
                [
                    Entity("g", "G", "Category"),
                    Entity("a", "A", "Item"),
                    Entity("b", "B", "Item"),
                ],
                [
                    RelationTriple("a", "has_genre", "g"),
                    RelationTriple("b", "has_genre", "g"),
                ],
            ),
            "has_genre",
        )
        assert np.allclose(category_node_vector("g", h, items), [0.5, 0.5])

    def test_single_member_category_is_identity(self, small_graph, small_hierarchy):
        items = NodeEmbeddingTable({"i1": np.array([2.0, 3.0]), "i2": np.array([2.0, 3.0])}, set(), 2)
        assert np.allclose(category_node_vector("c1", small_hierarchy, items), [2.0, 3.0])

    def test_three_member_mean_against_scalar_loop(self):
        vecs = {"a": [0.3, -0.2], "b": [1.5, 0.4], "c": [-0.9, 2.2]}
        items = NodeEmbeddingTable(
            {k: np.array(v) for k, v in vecs.items()}, set(), 2
        )
        g = KnowledgeGraph(
            [Entity("g", "G", "Category")]
            + [Entity(k, k.upper(), "Item") for k in vecs],
            [RelationTriple(k, "has_genre", "g") for k in vecs],
        )
        h = build_hierarchy(g, "has_genre")
        expected = [
            sum(vecs[k][0] for k in vecs) / 3.0,
            sum(vecs[k][1] for k in vecs) / 3.0,
        ]
        assert np.allclose(category_node_vector("g", h, items), expected, atol=1e-12)

    def test_empty_category_rejected(self, small_hierarchy):
        items = NodeEmbeddingTable({}, set(), 2)
        with pytest.raises(ValueError):
            category_node_vector("c1", small_hierarchy, items)

    def test_build_node_table_mean_property(self, small_graph, small_hierarchy):
        t = table(comedy=[1, 0], film=[0, 1])
        nt = build_node_table(small_graph, small_hierarchy, t, PASS_ALL)
        for cat in small_hierarchy.categories():
            members = small_hierarchy.members_of[cat]
            mean = np.mean([nt.get(m) for m in members], axis=0)
            assert np.allclose(nt.get(cat), mean, atol=1e-9)


def _dense_rgcn_reference(n, triples_by_rel, base, rel_w, self_w, layers):
    """Independent dense evaluation: row-normalized adjacency per relation,
    empty rows contribute nothing."""
    H = np.array(base, dtype=float)
    for layer in range(layers):
        out = H @ self_w[layer].T
        for rel, pairs in triples_by_rel.items():
            A = np.zeros((n, n))
            for s, o in pairs:
                A[s, o] = 1.0
            deg = A.sum(axis=1, keepdims=True)
            with np.errstate(invalid="ignore", divide="ignore"):
                A = np.where(deg > 0, A / deg, 0.0)
            out += (A @ H) @ rel_w[layer][rel].T
        H = np.maximum(out, 0.0)
    return H


class TestRgcn:
    def test_isolated_node_identity_relu(self):
        g = KnowledgeGraph([Entity("x", "X", "Item")], [])
        params = RgcnParameters(
            relation_weights=[{}],
            self_weights=[np.eye(2)],
            base={"x": np.array([0.3, -0.2])},
        )
        assert np.allclose(rgcn_entity_embedding(g, params, "x"), [0.3, 0.0])

    def test_single_relation_hand_case(self):
        g = KnowledgeGraph(
            [Entity("s", "S", "Item"), Entity("n1", "N1", "Item"), Entity("n2", "N2", "Item")],
            [RelationTriple("s", "r", "n1"), RelationTriple("s", "r", "n2")],
        )
        params = RgcnParameters(
            relation_weights=[{"r": np.eye(2)}],
            self_weights=[np.eye(2)],
            base={
                "s": np.array([0.5, 0.5]),
                "n1": np.array([1.0, 0.0]),
                "n2": np.array([0.0, 1.0]),
            },
        )
        assert np.allclose(rgcn_entity_embedding(g, params, "s"), [1.0, 1.0])

    def test_two_layers_match_dense_reference(self):
        rng = np.random.default_rng(7)
        names = [f"e{i}" for i in range(5)]
        entities = [Entity(n, n.upper(), "Item") for n in names]
        pairs_r1 = [(0, 1), (0, 2), (1, 3), (4, 0)]
        pairs_r2 = [(2, 4), (3, 3), (1, 0)]
        triples = [RelationTriple(names[s], "r1", names[o]) for s, o in pairs_r1]
        triples += [RelationTriple(names[s], "r2", names[o]) for s, o in pairs_r2]
        g = KnowledgeGraph(entities, triples)

        d, L = 3, 2
        base_rows = rng.normal(size=(5, d))
        rel_w = [{"r1": rng.normal(size=(d, d)), "r2": rng.normal(size=(d, d))} for _ in range(L)]
        self_w = [rng.normal(size=(d, d)) for _ in range(L)]
        params = RgcnParameters(
            relation_weights=rel_w,
            self_weights=self_w,
            base={n: base_rows[i] for i, n in enumerate(names)},
        )
        got = rgcn_embedding_table(g, params)
        want = _dense_rgcn_reference(
            5, {"r1": pairs_r1, "r2": pairs_r2}, base_rows, rel_w, self_w, L
        )
        for i, n in enumerate(names):
            assert np.allclose(got[n], want[i], atol=1e-9)

    def test_zero_weights_collapse_to_activation_of_zero(self, small_graph):
        zero = np.zeros((2, 2))
        base = {eid: np.ones(2) for eid in small_graph.entities}
        relu_params = RgcnParameters(
            relation_weights=[{r: zero for r in small_graph.predicates()}],
            self_weights=[zero],
            base=base,
        )
        for v in rgcn_embedding_table(small_graph, relu_params).values():
            assert np.all(v == 0.0)
        sig_params = RgcnParameters(
            relation_weights=[{r: zero for r in small_graph.predicates()}],
            self_weights=[zero],
            base=base,
            activation="sigmoid",
        )
        for v in rgcn_embedding_table(small_graph, sig_params).values():
            assert np.allclose(v, 0.5)

    def test_missing_base_embedding_rejected(self, small_graph):
        params = RgcnParameters(
            relation_weights=[{}], self_weights=[np.eye(2)], base={"i1": np.zeros(2)}
        )
        with pytest.raises(ValueError, match="base embedding"):
            rgcn_embedding_table(small_graph, params)

    def test_shape_mismatch_rejected(self, small_graph):
        params = RgcnParameters(
            relation_weights=[{}],
            self_weights=[np.eye(3)],
            base={eid: np.zeros(2) for eid in small_graph.entities},
        )
        with pytest.raises(ValueError, match="shape"):
            rgcn_embedding_table(small_graph, params)

    def test_layer_count_validated(self):
        with pytest.raises(ValueError):
            RgcnParameters(relation_weights=[], self_weights=[], base={})

    def test_activation_validated(self):
        with pytest.raises(ValueError, match="activation"):
            RgcnParameters(
                relation_weights=[{}], self_weights=[np.eye(2)], base={}, activation="tanh"
            )


class TestCosine:
    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_self_similarity(self):
        v = np.array([0.3, -0.7, 0.1])
        assert cosine(v, v) == pytest.approx(1.0)

    def test_closed_form(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.7071067811865475, abs=1e-5)

    def test_zero_norm_defined_as_zero(self):
        assert cosine(np.zeros(3), np.ones(3)) == 0.0

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(2), np.zeros(3))

    @given(
        arrays(np.float64, 3, elements=st.floats(-5, 5)),
        arrays(np.float64, 3, elements=st.floats(-5, 5)),
        st.floats(min_value=0.1, max_value=10),
    )
    @settings(max_examples=80)
    def test_symmetry_and_scale_invariance(self, a, b, k):
        assert cosine(a, b) == pytest.approx(cosine(b, a), abs=1e-12)
        assert cosine(k * a, b) == pytest.approx(cosine(a, b), abs=1e-9)

    def test_normalize_unit_and_zero(self):
        v = normalize(np.array([0.5, 1.0]))
        assert np.allclose(v, [0.4472135954999579, 0.8944271909999159])
        assert np.all(normalize(np.zeros(4)) == 0.0)
