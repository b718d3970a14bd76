import pytest

from sit.corpus import PosLexicon, PosTag, tag_sentence, tokenize
from sit.errors import BackendError, CorpusError, ProtocolError, VariantGenerationError
from sit.variants import (Candidate, DictionaryBackend, MaskedQuery, MlmBackend,
                          Variant, generate_variants, load_substitution_table)

LEXICON = PosLexicon({
    "cat": PosTag.NOUN, "dog": PosTag.NOUN, "fox": PosTag.NOUN,
    "rat": PosTag.NOUN, "bat": PosTag.NOUN, "owl": PosTag.NOUN,
    "big": PosTag.ADJ, "small": PosTag.ADJ, "ran": PosTag.VERB,
})


def tagged(text):
    return tag_sentence(tokenize(text), LEXICON)


class TestMaskedQuery:
    def test_mask_index_validated(self):
        with pytest.raises(ValueError):
            MaskedQuery(tokens=("a", "b"), mask_index=2, top_k=3)
        with pytest.raises(ValueError):
            MaskedQuery(tokens=("a", "b"), mask_index=-1, top_k=3)


class TestVariantText:
    def test_text_joins_tokens(self):
        v = Variant(sentence_tokens=("the", "dog", "ran"), source_position=1,
                    original_token="cat", replacement_token="dog")
        assert v.text == "the dog ran"


class TestDictionaryBackend:
    def test_returns_at_most_top_k(self):
        backend = DictionaryBackend({"cat": ["dog", "fox", "rat"]})
        query = MaskedQuery(tokens=("the", "cat"), mask_index=1, top_k=2)
        assert [c.token for c in backend.substitute(query)] == ["dog", "fox"]

    def test_lookup_case_insensitive(self):
        backend = DictionaryBackend({"Cat": ["dog"]})
        query = MaskedQuery(tokens=("CAT",), mask_index=0, top_k=5)
        assert backend.substitute(query) == [Candidate(token="dog")]

    def test_unknown_word_yields_nothing(self):
        backend = DictionaryBackend({})
        query = MaskedQuery(tokens=("cat",), mask_index=0, top_k=5)
        assert backend.substitute(query) == []

    def test_from_file(self, tmp_path):
        path = tmp_path / "subs.tsv"
        path.write_text("# head\ncat\tdog, fox ,rat\n")
        backend = DictionaryBackend.from_file(path)
        query = MaskedQuery(tokens=("cat",), mask_index=0, top_k=9)
        assert [c.token for c in backend.substitute(query)] == ["dog", "fox", "rat"]

    def test_load_table_errors(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("oneword\n")
        with pytest.raises(CorpusError, match="line 1"):
            load_substitution_table(bad)


class TestGenerateVariants:
    def test_variants_substitute_single_position(self):
        backend = DictionaryBackend({"cat": ["dog", "fox"]})
        batch = generate_variants(tagged("the cat ran"), backend, 5, LEXICON)
        assert [v.text for v in batch.variants] == ["the dog ran", "the fox ran"]
        assert all(v.source_position == 1 for v in batch.variants)
        assert all(v.original_token == "cat" for v in batch.variants)

    def test_identity_replacement_filtered_casefold(self):
        backend = DictionaryBackend({"cat": ["CAT", "Cat", "dog"]})
        batch = generate_variants(tagged("the cat ran"), backend, 5, LEXICON)
        assert [v.replacement_token for v in batch.variants] == ["dog"]

    def test_pos_mismatch_filtered(self):
        backend = DictionaryBackend({"cat": ["ran", "big", "dog"]})
        batch = generate_variants(tagged("the cat ran"), backend, 5, LEXICON)
        # "ran" is a verb, "big" an adjective; neither matches the noun slot
        assert [v.replacement_token for v in batch.variants] == ["dog"]

    def test_whitespace_and_empty_tokens_filtered(self):
        class WeirdBackend:
            def substitute(self, query):
                return [Candidate(""), Candidate("two words"), Candidate("dog")]

        batch = generate_variants(tagged("the cat ran"), WeirdBackend(), 5, LEXICON)
        assert [v.replacement_token for v in batch.variants] == ["dog"]

    def test_first_k_survivors_kept(self):
        backend = DictionaryBackend({"cat": ["dog", "fox", "rat", "bat", "owl"]})
        batch = generate_variants(tagged("the cat ran"), backend, 3, LEXICON)
        assert [v.replacement_token for v in batch.variants] == ["dog", "fox", "rat"]

    def test_multiple_candidate_positions(self):
        backend = DictionaryBackend({"cat": ["dog"], "big": ["small"]})
        batch = generate_variants(tagged("the big cat ran"), backend, 5, LEXICON)
        assert {(v.source_position, v.replacement_token) for v in batch.variants} == {
            (1, "small"), (2, "dog"),
        }

    def test_no_candidate_positions_yields_empty(self):
        backend = DictionaryBackend({})
        batch = generate_variants(tagged("ran ran ran"), backend, 5, LEXICON)
        assert batch.variants == [] and batch.failures == []

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            generate_variants(tagged("the cat ran"), DictionaryBackend({}), 0, LEXICON)

    def test_all_positions_failing_raises(self):
        class DownBackend:
            def substitute(self, query):
                raise BackendError("down")

        with pytest.raises(VariantGenerationError):
            generate_variants(tagged("the big cat ran"), DownBackend(), 5, LEXICON)

    def test_partial_failure_recorded(self):
        class FlakyBackend:
            def substitute(self, query):
                if query.mask_index == 1:
                    raise BackendError("down")
                return [Candidate("dog")]

        batch = generate_variants(tagged("the big cat ran"), FlakyBackend(), 5, LEXICON)
        assert [f.position for f in batch.failures] == [1]
        assert [v.replacement_token for v in batch.variants] == ["dog"]


class TestMlmBackend:
    def test_success_parses_candidates(self, http_stub):
        def script(path, body, index):
            assert path == "/substitute"
            assert body["mask_index"] == 1
            return 200, {"candidates": [
                {"token": "dog", "score": 0.9}, {"token": "fox", "score": 0.5}]}

        stub = http_stub(script)
        backend = MlmBackend(stub.url)
        got = backend.substitute(MaskedQuery(tokens=("the", "cat"), mask_index=1, top_k=2))
        assert got == [Candidate("dog", 0.9), Candidate("fox", 0.5)]

    def test_retries_then_succeeds_on_500(self, http_stub):
        def script(path, body, index):
            if index == 0:
                return 500, {"error": "boom"}
            return 200, {"candidates": []}

        stub = http_stub(script)
        backend = MlmBackend(stub.url, backoff=0.01)
        assert backend.substitute(MaskedQuery(("cat",), 0, 1)) == []
        assert len(stub.calls) == 2

    def test_retries_exhausted_raises(self, http_stub):
        stub = http_stub(lambda path, body, index: (429, {"error": "slow down"}))
        backend = MlmBackend(stub.url, attempts=3, backoff=0.01)
        with pytest.raises(BackendError, match="after 3 attempts"):
            backend.substitute(MaskedQuery(("cat",), 0, 1))
        assert len(stub.calls) == 3

    def test_client_error_fails_immediately(self, http_stub):
        stub = http_stub(lambda path, body, index: (400, {"error": "bad index"}))
        backend = MlmBackend(stub.url, backoff=0.01)
        with pytest.raises(BackendError, match="400"):
            backend.substitute(MaskedQuery(("cat",), 0, 1))
        assert len(stub.calls) == 1

    def test_malformed_payload_is_protocol_error(self, http_stub):
        stub = http_stub(lambda path, body, index: (200, {"wrong": []}))
        backend = MlmBackend(stub.url)
        with pytest.raises(ProtocolError, match="substitution response"):
            backend.substitute(MaskedQuery(("cat",), 0, 1))

    def test_connection_refused_retries_then_raises(self):
        backend = MlmBackend("http://127.0.0.1:9", attempts=2, backoff=0.01, timeout=0.5)
        with pytest.raises(BackendError):
            backend.substitute(MaskedQuery(("cat",), 0, 1))
