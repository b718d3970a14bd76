"""Target-sentence structure representations.

Three interchange forms are supported: the raw target string, constituency
label multisets built from Penn-bracketed trees, and dependency relation
multisets built from CoNLL-U. Real parsers stay external (a line-oriented
subprocess adapter ingests their output); a deterministic stub parser makes
fault-injection tests closed-form.
"""

from __future__ import annotations

import subprocess
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

from .corpus import PosTag, TaggedSentence, Token
from .errors import AdapterError, ConlluParseError, PtbParseError

# ---------------------------------------------------------------------------
# Constituency trees (Penn bracketing)
# ---------------------------------------------------------------------------

_ATOM_END = {"(", ")"}


@dataclass(frozen=True)
class ConstituencyTree:
    label: str
    children: tuple[Union["ConstituencyTree", str], ...]

    def internal_labels(self, include_preterminals: bool = False) -> list[str]:
        """Labels of internal nodes, optionally skipping POS preterminals.

        A preterminal is a node whose only child is a terminal word.
        """
        labels: list[str] = []
        stack: list[ConstituencyTree] = [self]
        while stack:
            node = stack.pop()
            preterminal = len(node.children) == 1 and isinstance(node.children[0], str)
            if include_preterminals or not preterminal:
                labels.append(node.label)
            for child in node.children:
                if isinstance(child, ConstituencyTree):
                    stack.append(child)
        return labels


def parse_ptb(text: str) -> ConstituencyTree:
    """Parse one bracketed tree; offsets in errors are 1-based characters."""
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def read_atom() -> str:
        nonlocal pos
        start = pos
        while pos < n and not text[pos].isspace() and text[pos] not in _ATOM_END:
            pos += 1
        if pos == start:
            raise PtbParseError("expected a label or word", start + 1)
        return text[start:pos]

    def read_node() -> ConstituencyTree:
        nonlocal pos
        if pos >= n or text[pos] != "(":
            raise PtbParseError("expected '('", pos + 1)
        pos += 1
        skip_ws()
        if pos >= n:
            raise PtbParseError("unexpected end of input", pos + 1)
        if text[pos] in _ATOM_END:
            raise PtbParseError("empty node", pos + 1)
        label = read_atom()
        children: list[ConstituencyTree | str] = []
        while True:
            skip_ws()
            if pos >= n:
                raise PtbParseError("unexpected end of input", pos + 1)
            if text[pos] == ")":
                pos += 1
                break
            if text[pos] == "(":
                children.append(read_node())
            else:
                children.append(read_atom())
        if not children:
            raise PtbParseError("empty node", pos)
        return ConstituencyTree(label=label, children=tuple(children))

    skip_ws()
    tree = read_node()
    skip_ws()
    if pos != n:
        raise PtbParseError("trailing content after tree", pos + 1)
    return tree


def serialize_ptb(tree: ConstituencyTree) -> str:
    parts = [serialize_ptb(c) if isinstance(c, ConstituencyTree) else c for c in tree.children]
    return "(" + " ".join([tree.label, *parts]) + ")"


# ---------------------------------------------------------------------------
# Dependency graphs (CoNLL-U)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DependencyNode:
    node_id: int  # 1-based
    form: str
    upos: str


@dataclass(frozen=True)
class DependencyEdge:
    head: int  # 0 for root
    dependent: int
    relation: str


@dataclass(frozen=True)
class DependencyGraph:
    nodes: tuple[DependencyNode, ...]
    edges: tuple[DependencyEdge, ...]


def parse_conllu(text: str) -> list[DependencyGraph]:
    """Parse CoNLL-U blocks into dependency graphs.

    Multi-word token ranges (``1-2``) and empty nodes (``1.1``) are skipped.
    Every sentence must carry exactly one root edge.
    """
    graphs: list[DependencyGraph] = []
    nodes: list[DependencyNode] = []
    edges: list[DependencyEdge] = []
    block_start = 1

    def flush(at_line: int):
        nonlocal nodes, edges
        if not nodes:
            return
        roots = sum(1 for e in edges if e.head == 0)
        if roots != 1:
            raise ConlluParseError(f"sentence starting here has {roots} root edges, expected 1", at_line)
        graphs.append(DependencyGraph(nodes=tuple(nodes), edges=tuple(edges)))
        nodes, edges = [], []

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush(block_start)
            block_start = lineno + 1
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(f"expected 10 tab-separated columns, got {len(cols)}", lineno)
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            continue
        try:
            node_id = int(token_id)
        except ValueError:
            raise ConlluParseError(f"non-integer token id {token_id!r}", lineno) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluParseError(f"non-integer head {cols[6]!r}", lineno) from None
        nodes.append(DependencyNode(node_id=node_id, form=cols[1], upos=cols[3]))
        edges.append(DependencyEdge(head=head, dependent=node_id, relation=cols[7]))
    flush(block_start)
    return graphs


# UD UPOS values folded onto the coarse tag set used for candidate selection.
_UPOS_MAP = {
    "NOUN": PosTag.NOUN,
    "PROPN": PosTag.NOUN,
    "ADJ": PosTag.ADJ,
    "VERB": PosTag.VERB,
    "AUX": PosTag.VERB,
    "ADV": PosTag.ADV,
    "DET": PosTag.DET,
    "PRON": PosTag.PRON,
    "ADP": PosTag.ADP,
    "NUM": PosTag.NUM,
    "CCONJ": PosTag.CONJ,
    "SCONJ": PosTag.CONJ,
    "CONJ": PosTag.CONJ,
    "PART": PosTag.PART,
    "PUNCT": PosTag.PUNCT,
}


def tagged_sentence_from_graph(graph: DependencyGraph) -> TaggedSentence:
    """Build a tagged source sentence from pre-tagged CoNLL-U (UPOS wins)."""
    tokens = tuple(Token(text=node.form, index=i) for i, node in enumerate(graph.nodes))
    tags = tuple(_UPOS_MAP.get(node.upos, PosTag.OTHER) for node in graph.nodes)
    raw = " ".join(node.form for node in graph.nodes)
    return TaggedSentence(tokens=tokens, tags=tags, raw=raw)


# ---------------------------------------------------------------------------
# Relation multisets and the representation union
# ---------------------------------------------------------------------------


class RelationMultiset:
    """Bag of relation labels; zero counts are never stored."""

    __slots__ = ("counts",)

    def __init__(self, counts: Mapping[str, int] | None = None):
        clean: dict[str, int] = {}
        for label, count in (counts or {}).items():
            if count < 0:
                raise ValueError(f"negative count for {label!r}")
            if count:
                clean[label] = int(count)
        self.counts = clean

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "RelationMultiset":
        return cls(Counter(labels))

    def total(self) -> int:
        return sum(self.counts.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, RelationMultiset) and self.counts == other.counts

    def __hash__(self):
        return hash(frozenset(self.counts.items()))

    def __repr__(self):
        inner = ", ".join(f"{k}:{v}" for k, v in sorted(self.counts.items()))
        return f"RelationMultiset({{{inner}}})"


class ReprKind(Enum):
    RAW = "raw"
    CONSTITUENCY = "constituency"
    DEPENDENCY = "dependency"


@dataclass(frozen=True)
class StructureRepr:
    kind: ReprKind
    value: str | RelationMultiset

    @classmethod
    def raw(cls, target: str) -> "StructureRepr":
        return cls(ReprKind.RAW, target)

    @classmethod
    def constituency(cls, multiset: RelationMultiset) -> "StructureRepr":
        return cls(ReprKind.CONSTITUENCY, multiset)

    @classmethod
    def dependency(cls, multiset: RelationMultiset) -> "StructureRepr":
        return cls(ReprKind.DEPENDENCY, multiset)


def constituency_multiset(tree: ConstituencyTree, include_preterminals: bool = False) -> RelationMultiset:
    """Count internal node labels; preterminal POS nodes excluded by default."""
    return RelationMultiset.from_labels(tree.internal_labels(include_preterminals))


def dependency_multiset(graph: DependencyGraph) -> RelationMultiset:
    """Count DEPREL labels over all edges, root included."""
    return RelationMultiset.from_labels(e.relation for e in graph.edges)


# ---------------------------------------------------------------------------
# External parser adapter
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdapterSpec:
    """Subprocess contract: sentences in on stdin (one per line), parses out.

    ``mode`` selects the expected output format: one bracketed tree per line
    for constituency, CoNLL-U blocks in order for dependency.
    """

    command: tuple[str, ...]
    mode: ReprKind
    timeout: float = 120.0


def run_adapter(sentences: Sequence[str], adapter: AdapterSpec,
                include_preterminals: bool = False) -> list[StructureRepr]:
    if adapter.mode not in (ReprKind.CONSTITUENCY, ReprKind.DEPENDENCY):
        raise AdapterError(f"adapter mode must be constituency or dependency, got {adapter.mode}")
    stdin = "".join(s + "\n" for s in sentences)
    try:
        proc = subprocess.run(
            list(adapter.command),
            input=stdin,
            capture_output=True,
            text=True,
            timeout=adapter.timeout,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise AdapterError(f"adapter {adapter.command[0]!r} failed to run: {exc}") from exc
    if proc.returncode != 0:
        raise AdapterError(
            f"adapter {adapter.command[0]!r} exited {proc.returncode}; stderr: {proc.stderr.strip()}"
        )
    try:
        if adapter.mode is ReprKind.CONSTITUENCY:
            lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
            reprs = [
                StructureRepr.constituency(constituency_multiset(parse_ptb(ln), include_preterminals))
                for ln in lines
            ]
        else:
            graphs = parse_conllu(proc.stdout)
            reprs = [StructureRepr.dependency(dependency_multiset(g)) for g in graphs]
    except (PtbParseError, ConlluParseError) as exc:
        raise AdapterError(f"adapter output malformed: {exc}") from exc
    if len(reprs) != len(sentences):
        raise AdapterError(f"adapter returned {len(reprs)} parses for {len(sentences)} sentences")
    return reprs


def parse_trees(sentences: Sequence[str], adapter: AdapterSpec,
                include_preterminals: bool = False) -> list[StructureRepr]:
    """Alias kept close to the adapter; see :func:`run_adapter`."""
    return run_adapter(sentences, adapter, include_preterminals)


# ---------------------------------------------------------------------------
# Deterministic stub parser
# ---------------------------------------------------------------------------

STUB_UNKNOWN_LABEL = "dep"


class StubParser:
    """Maps each token to a fixed relation label; unknown tokens become "dep".

    The multiset is a pure bag over tokens, so dropping one token moves the
    total by exactly 1 and reordering changes nothing. That makes deletion and
    duplication faults exactly detectable and reorder faults exactly
    invisible, which is what the fault-injection oracle needs.
    """

    def __init__(self, relation_lexicon: Mapping[str, str] | None = None):
        self._lexicon = dict(relation_lexicon or {})

    def parse_tokens(self, tokens: Iterable[str]) -> RelationMultiset:
        return RelationMultiset.from_labels(
            self._lexicon.get(tok, STUB_UNKNOWN_LABEL) for tok in tokens
        )

    def parse(self, sentence: str) -> RelationMultiset:
        return self.parse_tokens(sentence.split())
