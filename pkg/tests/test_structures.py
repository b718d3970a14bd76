import random
import sys

import pytest

from sit.corpus import PosTag
from sit.errors import AdapterError, ConlluParseError, PtbParseError
from sit.structures import (AdapterSpec, ConstituencyTree, RelationMultiset,
                            ReprKind, StructureRepr, StubParser,
                            constituency_multiset, dependency_multiset,
                            parse_conllu, parse_ptb, run_adapter, serialize_ptb,
                            tagged_sentence_from_graph)
from oracles import random_ptb_text


class TestParsePtb:
    def test_simple_tree(self):
        tree = parse_ptb("(S (NP (DT the) (NN cat)) (VP (VBZ sleeps)))")
        assert tree.label == "S"
        assert isinstance(tree.children[0], ConstituencyTree)
        assert tree.children[0].label == "NP"

    def test_truncated_input_offset(self):
        with pytest.raises(PtbParseError) as exc:
            parse_ptb("(S (NP")
        assert exc.value.offset == 7

    def test_missing_open_paren(self):
        with pytest.raises(PtbParseError) as exc:
            parse_ptb("S NP)")
        assert exc.value.offset == 1

    def test_empty_node_rejected(self):
        with pytest.raises(PtbParseError, match="empty node"):
            parse_ptb("(S ())")

    def test_trailing_content_rejected(self):
        with pytest.raises(PtbParseError, match="trailing"):
            parse_ptb("(S (NN cat)) extra")

    def test_round_trip_small(self):
        text = "(S (NP (DT the) (NN cat)) (VP (VBZ sat)))"
        assert serialize_ptb(parse_ptb(text)) == text

    def test_round_trip_random(self):
        rng = random.Random(31337)
        for _ in range(50):
            text = random_ptb_text(rng)
            assert serialize_ptb(parse_ptb(text)) == text

    def test_internal_labels_skip_preterminals_by_default(self):
        tree = parse_ptb("(S (NP (DT the) (NN cat)) (VP (VBZ sleeps)))")
        assert sorted(tree.internal_labels()) == ["NP", "S", "VP"]
        with_pos = tree.internal_labels(include_preterminals=True)
        assert sorted(with_pos) == ["DT", "NN", "NP", "S", "VBZ", "VP"]

    def test_constituency_multiset(self):
        tree = parse_ptb("(S (NP (DT a) (NN b)) (NP (NN c)))")
        assert constituency_multiset(tree) == RelationMultiset({"S": 1, "NP": 2})


class TestParseConllu:
    def test_fixture_parses(self, ud_sample_path):
        graphs = parse_conllu(ud_sample_path.read_text(encoding="utf-8"))
        assert len(graphs) == 10
        for graph in graphs:
            roots = [e for e in graph.edges if e.head == 0]
            assert len(roots) == 1

    def test_multiset_total_equals_token_count(self, ud_sample_path):
        for graph in parse_conllu(ud_sample_path.read_text(encoding="utf-8")):
            assert dependency_multiset(graph).total() == len(graph.nodes)

    def test_range_and_empty_ids_skipped(self):
        text = (
            "1-2\tyou're\t_\t_\t_\t_\t_\t_\t_\t_\n"
            "1\tyou\tyou\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
            "2\t're\tbe\tAUX\t_\t_\t0\troot\t_\t_\n"
            "2.1\tbeing\tbe\tVERB\t_\t_\t_\t_\t_\t_\n"
        )
        (graph,) = parse_conllu(text)
        assert [n.form for n in graph.nodes] == ["you", "'re"]

    def test_wrong_column_count(self):
        with pytest.raises(ConlluParseError) as exc:
            parse_conllu("1\tcat\tcat\n")
        assert exc.value.line == 1

    def test_non_integer_head(self):
        text = "1\tcat\tcat\tNOUN\t_\t_\tX\tnsubj\t_\t_\n"
        with pytest.raises(ConlluParseError, match="head"):
            parse_conllu(text)

    def test_zero_roots_rejected(self):
        text = (
            "1\ta\ta\tDET\t_\t_\t2\tdet\t_\t_\n"
            "2\tb\tb\tNOUN\t_\t_\t1\tnsubj\t_\t_\n"
        )
        with pytest.raises(ConlluParseError, match="0 root"):
            parse_conllu(text)

    def test_two_roots_rejected(self):
        text = (
            "1\ta\ta\tVERB\t_\t_\t0\troot\t_\t_\n"
            "2\tb\tb\tVERB\t_\t_\t0\troot\t_\t_\n"
        )
        with pytest.raises(ConlluParseError, match="2 root"):
            parse_conllu(text)

    def test_tagged_sentence_from_graph_maps_upos(self):
        text = (
            "1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
            "2\tcat\tcat\tNOUN\t_\t_\t0\troot\t_\t_\n"
            "3\tzzz\tzzz\tXYZ\t_\t_\t2\tdep\t_\t_\n"
        )
        (graph,) = parse_conllu(text)
        sentence = tagged_sentence_from_graph(graph)
        assert sentence.tags == (PosTag.DET, PosTag.NOUN, PosTag.OTHER)
        assert sentence.texts == ("the", "cat", "zzz")


class TestRelationMultiset:
    def test_zero_counts_dropped(self):
        assert RelationMultiset({"a": 0, "b": 2}).counts == {"b": 2}

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            RelationMultiset({"a": -1})

    def test_equality_and_hash(self):
        m1 = RelationMultiset({"a": 1, "b": 0})
        m2 = RelationMultiset.from_labels(["a"])
        assert m1 == m2
        assert hash(m1) == hash(m2)

    def test_total(self):
        assert RelationMultiset({"a": 2, "b": 3}).total() == 5


class TestStubParser:
    def test_labels_from_lexicon_with_fallback(self):
        parser = StubParser({"cat": "obj", "sleeps": "root"})
        assert parser.parse("the cat sleeps") == RelationMultiset(
            {"dep": 1, "obj": 1, "root": 1})

    def test_reordering_is_invisible(self):
        parser = StubParser()
        assert parser.parse("a b c") == parser.parse("c a b")

    def test_dropping_a_token_moves_total_by_one(self):
        parser = StubParser()
        full = parser.parse("a b c")
        dropped = parser.parse("a b")
        assert full.total() - dropped.total() == 1


ADAPTER_OK = (
    "import sys\n"
    "for line in sys.stdin:\n"
    "    words = line.split()\n"
    "    inner = ' '.join('(NN %s)' % w for w in words)\n"
    "    print('(S %s)' % inner)\n"
)

ADAPTER_CONLLU = (
    "import sys\n"
    "for line in sys.stdin:\n"
    "    words = line.split()\n"
    "    for i, w in enumerate(words, start=1):\n"
    "        head = 0 if i == 1 else 1\n"
    "        rel = 'root' if i == 1 else 'dep'\n"
    "        print('\\t'.join([str(i), w, w, 'NOUN', '_', '_', str(head), rel, '_', '_']))\n"
    "    print()\n"
)


def adapter_spec(tmp_path, code: str, mode: ReprKind) -> AdapterSpec:
    script = tmp_path / "adapter.py"
    script.write_text(code)
    return AdapterSpec(command=(sys.executable, str(script)), mode=mode)


class TestRunAdapter:
    def test_constituency_mode(self, tmp_path):
        spec = adapter_spec(tmp_path, ADAPTER_OK, ReprKind.CONSTITUENCY)
        reprs = run_adapter(["the cat", "a dog barks"], spec)
        assert [r.kind for r in reprs] == [ReprKind.CONSTITUENCY] * 2
        assert reprs[0].value == RelationMultiset({"S": 1})

    def test_dependency_mode(self, tmp_path):
        spec = adapter_spec(tmp_path, ADAPTER_CONLLU, ReprKind.DEPENDENCY)
        reprs = run_adapter(["the cat", "dogs"], spec)
        assert reprs[0].value == RelationMultiset({"root": 1, "dep": 1})
        assert reprs[1].value == RelationMultiset({"root": 1})

    def test_nonzero_exit_raises(self, tmp_path):
        spec = adapter_spec(tmp_path, "import sys; sys.exit(3)", ReprKind.CONSTITUENCY)
        with pytest.raises(AdapterError, match="exited 3"):
            run_adapter(["x"], spec)

    def test_count_mismatch_raises(self, tmp_path):
        spec = adapter_spec(tmp_path, "print('(S (NN x))')", ReprKind.CONSTITUENCY)
        with pytest.raises(AdapterError, match="1 parses for 2"):
            run_adapter(["a", "b"], spec)

    def test_malformed_output_raises(self, tmp_path):
        spec = adapter_spec(tmp_path, "print('(S (NP')", ReprKind.CONSTITUENCY)
        with pytest.raises(AdapterError, match="malformed"):
            run_adapter(["x"], spec)

    def test_missing_binary_raises(self):
        spec = AdapterSpec(command=("/nonexistent/parser",), mode=ReprKind.DEPENDENCY)
        with pytest.raises(AdapterError, match="failed to run"):
            run_adapter(["x"], spec)

    def test_raw_mode_rejected(self):
        spec = AdapterSpec(command=("true",), mode=ReprKind.RAW)
        with pytest.raises(AdapterError):
            run_adapter(["x"], spec)


class TestStructureRepr:
    def test_constructors_set_kind(self):
        assert StructureRepr.raw("x").kind is ReprKind.RAW
        assert StructureRepr.constituency(RelationMultiset()).kind is ReprKind.CONSTITUENCY
        assert StructureRepr.dependency(RelationMultiset()).kind is ReprKind.DEPENDENCY
