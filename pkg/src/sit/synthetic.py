"""Synthetic test corpus with exactly known detection behavior.

Each sentence follows one template, ``the noun<i> verb<i> today .``, whose
only substitution candidate is the noun. The translation lexicon maps a noun
and all of its substitution alternates to the same target word, so a
fault-free variant translates to exactly the original's translation and
every metric sees distance zero. Any nonzero distance is therefore caused by
an injected fault, which makes recall, precision and accuracy computable in
closed form.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import PosLexicon, PosTag, TaggedSentence, Token
from .detector import OriginalInput, VariantInput
from .evaluation import PlannedFault
from .gateway import FaultKind, TranslationPair
from .structures import ReprKind, StructureRepr, StubParser
from .variants import Variant

ALTERNATES_PER_NOUN = 6
NOUN_POSITION = 1
FAULT_TOKEN = "today"


@dataclass(frozen=True)
class SyntheticSuite:
    sentences: tuple[TaggedSentence, ...]
    pos_lexicon: PosLexicon
    substitution_table: dict[str, list[str]]
    translation_lexicon: dict[str, str]
    relation_lexicon: dict[str, str]


def _sentence(i: int) -> TaggedSentence:
    words = ["the", f"noun{i}", f"verb{i}", FAULT_TOKEN, "."]
    tags = (PosTag.DET, PosTag.NOUN, PosTag.VERB, PosTag.ADV, PosTag.PUNCT)
    tokens = tuple(Token(text=w, index=j) for j, w in enumerate(words))
    return TaggedSentence(tokens=tokens, tags=tags, raw=" ".join(words))


def build_synthetic_suite(n_sentences: int = 100) -> SyntheticSuite:
    """Build sentences plus every lexicon the pipeline stages need."""
    sentences = []
    pos_entries: dict[str, PosTag] = {"the": PosTag.DET, FAULT_TOKEN: PosTag.ADV}
    substitution: dict[str, list[str]] = {}
    translation: dict[str, str] = {"the": "le", FAULT_TOKEN: "hoy", ".": "."}
    relations: dict[str, str] = {"le": "det", "hoy": "advmod", ".": "punct"}
    for i in range(n_sentences):
        sentences.append(_sentence(i))
        noun, verb = f"noun{i}", f"verb{i}"
        target_noun, target_verb = f"N{i}", f"V{i}"
        pos_entries[noun] = PosTag.NOUN
        pos_entries[verb] = PosTag.VERB
        translation[noun] = target_noun
        translation[verb] = target_verb
        relations[target_noun] = "obj"
        relations[target_verb] = "root"
        alternates = [f"noun{i}x{j}" for j in range(ALTERNATES_PER_NOUN)]
        substitution[noun] = alternates
        for alt in alternates:
            pos_entries[alt] = PosTag.NOUN
            translation[alt] = target_noun
    return SyntheticSuite(
        sentences=tuple(sentences),
        pos_lexicon=PosLexicon(pos_entries),
        substitution_table=substitution,
        translation_lexicon=translation,
        relation_lexicon=relations,
    )


def build_fault_plan(suite: SyntheticSuite, n_faults: int, seed: int,
                     kinds: Sequence[FaultKind] = (FaultKind.UNDER_TRANSLATION,
                                                   FaultKind.OVER_TRANSLATION)) -> list[PlannedFault]:
    """Assign one fault each to ``n_faults`` distinct originals.

    Faults always corrupt the shared adverb, which every variant contains,
    and alternate through ``kinds`` in order. WORD_MISTRANSLATION entries get
    a wrong-word detail; the others name the token directly.
    """
    if n_faults > len(suite.sentences):
        raise ValueError("cannot fault more originals than the suite contains")
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(len(suite.sentences)), n_faults))
    plan = []
    for j, original_id in enumerate(chosen):
        kind = kinds[j % len(kinds)]
        replacement_pick = rng.randrange(5)
        if kind is FaultKind.WORD_MISTRANSLATION:
            detail = f"{FAULT_TOKEN}=ayer"
        elif kind is FaultKind.UNCLEAR_LOGIC:
            detail = ""
        else:
            detail = FAULT_TOKEN
        plan.append(PlannedFault(
            original_id=original_id,
            position=NOUN_POSITION,
            replacement=f"noun{original_id}x{replacement_pick}",
            kind=kind,
            detail=detail,
        ))
    return plan


def build_near_miss_inputs(n: int = 10, start_id: int = 1000,
                           kind: ReprKind = ReprKind.DEPENDENCY) -> list[OriginalInput]:
    """Originals whose single variant sits at bag distance exactly j (1..n).

    The variant's translation drops the last j tokens of a shared 12-token
    target, so under a token-bag representation the distance is j. Useful
    for sweep fixtures with a known issue count at every threshold.
    """
    if kind is ReprKind.RAW:
        raise ValueError("near-miss gradation is defined for bag representations only")
    if n > 11:
        raise ValueError("the 12-token target supports gradations 1..11 only")
    parser = StubParser()

    def represent(target: str) -> StructureRepr:
        multiset = parser.parse(target)
        if kind is ReprKind.CONSTITUENCY:
            return StructureRepr.constituency(multiset)
        return StructureRepr.dependency(multiset)

    inputs = []
    for j in range(1, n + 1):
        case_id = start_id + j - 1
        source_tokens = ["the", f"landmark{j}", "stays", "fixed", FAULT_TOKEN, "."]
        source = " ".join(source_tokens)
        target_tokens = [f"w{j}t{t}" for t in range(12)]
        target = " ".join(target_tokens)
        variant_tokens = list(source_tokens)
        variant_tokens[NOUN_POSITION] = f"landmark{j}x"
        variant = Variant(
            sentence_tokens=tuple(variant_tokens),
            source_position=NOUN_POSITION,
            original_token=f"landmark{j}",
            replacement_token=f"landmark{j}x",
            backend_score=None,
        )
        variant_target = " ".join(target_tokens[:-j])
        inputs.append(OriginalInput(
            case_id=case_id,
            pair=TranslationPair(source=source, target=target, engine="mock"),
            representation=represent(target),
            variants=(VariantInput(
                variant=variant,
                pair=TranslationPair(source=variant.text, target=variant_target,
                                     engine="mock"),
                representation=represent(variant_target),
            ),),
        ))
    return inputs


def write_suite(suite: SyntheticSuite, directory: str | Path,
                plan: Sequence[PlannedFault] | None = None) -> dict[str, Path]:
    """Persist a suite as the file set the command-line stages consume."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": directory / "corpus.txt",
        "pos_lexicon": directory / "pos_lexicon.tsv",
        "substitutions": directory / "substitutions.tsv",
        "translation_lexicon": directory / "translation_lexicon.tsv",
        "relation_lexicon": directory / "relation_lexicon.tsv",
    }
    paths["corpus"].write_text(
        "".join(s.raw + "\n" for s in suite.sentences), encoding="utf-8")
    pos_lines = [f"{word}\t{suite.pos_lexicon.lookup(word).name}\n"
                 for word in sorted(_pos_words(suite))]
    paths["pos_lexicon"].write_text("".join(pos_lines), encoding="utf-8")
    paths["substitutions"].write_text(
        "".join(f"{word}\t{','.join(alts)}\n"
                for word, alts in sorted(suite.substitution_table.items())),
        encoding="utf-8")
    paths["translation_lexicon"].write_text(
        "".join(f"{src}\t{tgt}\n" for src, tgt in sorted(suite.translation_lexicon.items())),
        encoding="utf-8")
    paths["relation_lexicon"].write_text(
        "".join(f"{tok}\t{rel}\n" for tok, rel in sorted(suite.relation_lexicon.items())),
        encoding="utf-8")
    if plan is not None:
        paths["fault_plan"] = directory / "fault_plan.json"
        records = [
            {"original_id": f.original_id, "position": f.position,
             "replacement": f.replacement, "kind": f.kind.value, "detail": f.detail}
            for f in plan
        ]
        paths["fault_plan"].write_text(
            json.dumps(records, indent=2) + "\n", encoding="utf-8")
    return paths


def _pos_words(suite: SyntheticSuite) -> set[str]:
    words = {"the", FAULT_TOKEN}
    for noun, alternates in suite.substitution_table.items():
        words.add(noun)
        words.update(alternates)
    for sentence in suite.sentences:
        for token, tag in zip(sentence.tokens, sentence.tags):
            if tag is not PosTag.PUNCT:
                words.add(token.text)
    return words
