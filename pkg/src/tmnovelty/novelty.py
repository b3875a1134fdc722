"""Word-level novelty description built from trained clauses.

Clause literals are routed into two word bags by class and polarity: plain
words of for-votes and negated words of against-votes characterize the
clause's own group, everything else characterizes the other group.  A word's
novelty score is the ratio of its smoothed relative frequency in the novel
bag to that in the known bag, so scores above 1 lean novel and below 1 lean
known.  Pair scores divide clause co-occurrence probability by the product
of the individual word probabilities, exposing words that the clauses treat
as one context.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

from ._files import atomic_write_text
from .corpus import Label
from .tsetlin import ExtractedClause, Polarity


@dataclass(frozen=True)
class WordBags:
    """Raw word frequencies harvested from clauses, one bag per group."""

    known: Mapping[str, int]
    novel: Mapping[str, int]

    @property
    def total_known(self) -> int:
        return sum(self.known.values())

    @property
    def total_novel(self) -> int:
        return sum(self.novel.values())

    def words(self) -> list[str]:
        return sorted(set(self.known) | set(self.novel))


def build_word_bags(clauses: Sequence[ExtractedClause]) -> WordBags:
    """Route clause word sets into the known/novel bags with multiplicity.

    Plain words of a clause describe the group the clause votes for; negated
    words describe the other group.  An against-vote (negative polarity)
    flips the destination.  Each clause membership counts once.
    """
    bag_known: Counter[str] = Counter()
    bag_novel: Counter[str] = Counter()
    for clause in clauses:
        votes_known = (clause.label is Label.KNOWN) == (clause.polarity is Polarity.POSITIVE)
        if votes_known:
            bag_known.update(clause.plain_words)
            bag_novel.update(clause.negated_words)
        else:
            bag_novel.update(clause.plain_words)
            bag_known.update(clause.negated_words)
    return WordBags(known=dict(bag_known), novel=dict(bag_novel))


def merge_word_bags(*parts: WordBags) -> WordBags:
    """Combine partial bags by adding counts; associative, so partial bags
    built from clause-list chunks in any grouping merge to the same result."""
    known: Counter[str] = Counter()
    novel: Counter[str] = Counter()
    for part in parts:
        known.update(part.known)
        novel.update(part.novel)
    return WordBags(known=dict(known), novel=dict(novel))


def relative_frequency(bags: WordBags, word: str, label: Label, smoothing: bool = True) -> float:
    """Relative frequency of a word in one bag, with minimum-frequency-1 smoothing.

    Smoothing lifts only the word's own count; the bag total stays raw, so a
    word absent from a 14-word bag gets 1/14.
    """
    if word not in bags.known and word not in bags.novel:
        raise KeyError(f"unseen word: {word!r}")
    bag = bags.known if label is Label.KNOWN else bags.novel
    total = bags.total_known if label is Label.KNOWN else bags.total_novel
    if total == 0:
        raise ValueError("untrained description: empty bag")
    count = bag.get(word, 0)
    if smoothing:
        count = max(count, 1)
    return count / total


@dataclass(frozen=True)
class ScoreTable:
    """Per-word novelty scores plus the relative frequencies behind them."""

    scores: Mapping[str, float]
    rel_freq_known: Mapping[str, float]
    rel_freq_novel: Mapping[str, float]

    def __len__(self) -> int:
        return len(self.scores)

    def __contains__(self, word: str) -> bool:
        return word in self.scores


def novelty_scores(bags: WordBags, smoothing: bool = True) -> ScoreTable:
    """Score every word in either bag as p_novel / p_known.

    With smoothing on (the default) every score is finite and positive.
    With smoothing off, a word seen only in the known bag scores 0 and a
    word seen only in the novel bag scores inf.
    """
    total_known = bags.total_known
    total_novel = bags.total_novel
    if total_known == 0 or total_novel == 0:
        raise ValueError("untrained description: empty bag")
    scores: dict[str, float] = {}
    rel_known: dict[str, float] = {}
    rel_novel: dict[str, float] = {}
    for word in bags.words():
        in_known = bags.known.get(word, 0) > 0
        in_novel = bags.novel.get(word, 0) > 0
        p_known = relative_frequency(bags, word, Label.KNOWN, smoothing=smoothing)
        p_novel = relative_frequency(bags, word, Label.NOVEL, smoothing=smoothing)
        rel_known[word] = p_known
        rel_novel[word] = p_novel
        if smoothing:
            scores[word] = p_novel / p_known
        elif in_known and in_novel:
            scores[word] = p_novel / p_known
        elif in_known:
            scores[word] = 0.0
        else:
            scores[word] = math.inf
    return ScoreTable(scores=scores, rel_freq_known=rel_known, rel_freq_novel=rel_novel)


class Aggregator(str, Enum):
    """Document-level reduction of per-word scores."""

    MEAN_LOG = "mean_log"
    SUM_LOG = "sum_log"
    MAX = "max"
    FRACTION_ABOVE_ONE = "fraction_above_one"


@dataclass(frozen=True)
class ScoredDocument:
    """Per-word scores for the in-table tokens of one document, plus the aggregate.

    ``aggregate`` is None when no token of the document is scored.
    """

    word_scores: Mapping[str, float]
    aggregate: float | None
    aggregator: Aggregator


def score_document(
    tokens: Sequence[str],
    table: ScoreTable,
    aggregator: Aggregator = Aggregator.MEAN_LOG,
) -> ScoredDocument:
    """Look up each token's score and reduce over scored token occurrences."""
    if len(table) == 0:
        raise ValueError("empty score table")
    occurrence_scores = [table.scores[t] for t in tokens if t in table.scores]
    word_scores = {t: table.scores[t] for t in set(tokens) if t in table.scores}
    if not occurrence_scores:
        return ScoredDocument(word_scores={}, aggregate=None, aggregator=aggregator)
    if aggregator is Aggregator.MEAN_LOG:
        aggregate = sum(math.log(s) for s in occurrence_scores) / len(occurrence_scores)
    elif aggregator is Aggregator.SUM_LOG:
        aggregate = sum(math.log(s) for s in occurrence_scores)
    elif aggregator is Aggregator.MAX:
        aggregate = max(occurrence_scores)
    else:
        aggregate = sum(1 for s in occurrence_scores if s > 1.0) / len(occurrence_scores)
    return ScoredDocument(word_scores=word_scores, aggregate=aggregate, aggregator=aggregator)


@dataclass(frozen=True)
class ClauseCooccurrence:
    """How often word pairs share a clause within one group's clause pool."""

    label: Label
    pair_counts: Mapping[tuple[str, str], int]  # keys sorted (w1 <= w2), w1 < w2
    word_counts: Mapping[str, int]  # clauses whose plain set contains the word
    clause_count: int

    def pair_count(self, w1: str, w2: str) -> int:
        if w1 == w2:
            return self.word_counts.get(w1, 0)
        key = (w1, w2) if w1 <= w2 else (w2, w1)
        return self.pair_counts.get(key, 0)


def cooccurrence(
    clauses: Sequence[ExtractedClause],
    label: Label,
    clause_count: int | None = None,
) -> ClauseCooccurrence:
    """Count pairwise plain-word co-membership over one group's clauses.

    ``clause_count`` defaults to the number of the group's clauses present in
    the input; pass the model's pool size to count omitted empty clauses in
    the denominator.
    """
    group = [c for c in clauses if c.label is label]
    pairs: Counter[tuple[str, str]] = Counter()
    singles: Counter[str] = Counter()
    for clause in group:
        words = sorted(clause.plain_words)
        singles.update(words)
        pairs.update(combinations(words, 2))
    m = clause_count if clause_count is not None else len(group)
    return ClauseCooccurrence(
        label=label,
        pair_counts=dict(pairs),
        word_counts=dict(singles),
        clause_count=m,
    )


def contextual_score(
    co: ClauseCooccurrence,
    table: ScoreTable,
    word1: str,
    word2: str,
    mode: str = "bag",
) -> float:
    """Pair score: joint clause probability over the product of word probabilities.

    ``bag`` mode (default) takes the individual probabilities from the bag
    relative frequencies of the co-occurrence's group; ``clause`` mode uses
    per-clause frequencies (word clause count / pool size) for both sides,
    which bounds the score by 1/max(p1, p2).
    """
    if co.clause_count == 0:
        raise ValueError("no clauses available for co-occurrence scoring")
    p_joint = co.pair_count(word1, word2) / co.clause_count
    if mode == "bag":
        freqs = table.rel_freq_known if co.label is Label.KNOWN else table.rel_freq_novel
        try:
            p1, p2 = freqs[word1], freqs[word2]
        except KeyError as missing:
            raise KeyError(f"unscored word: {missing.args[0]!r}") from None
    elif mode == "clause":
        p1 = co.word_counts.get(word1, 0) / co.clause_count
        p2 = co.word_counts.get(word2, 0) / co.clause_count
        if p1 == 0.0 or p2 == 0.0:
            raise ValueError("word absent from every clause; no per-clause probability")
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'bag' or 'clause'")
    return p_joint / (p1 * p2)


# ---------------------------------------------------------------------------
# Exports.
# ---------------------------------------------------------------------------


def write_score_table(bags: WordBags, table: ScoreTable, path: str | Path) -> None:
    """CSV export sorted by descending score: word, counts, frequencies, score."""
    rows = ["word,freq_known,freq_novel,rel_freq_known,rel_freq_novel,score\n"]
    ordering = sorted(table.scores, key=lambda w: (-table.scores[w], w))
    for word in ordering:
        rows.append(
            f"{word},{bags.known.get(word, 0)},{bags.novel.get(word, 0)},"
            f"{table.rel_freq_known[word]!r},{table.rel_freq_novel[word]!r},{table.scores[word]!r}\n"
        )
    atomic_write_text(path, "".join(rows))


def write_cooccurrence_matrix(
    co: ClauseCooccurrence,
    table: ScoreTable,
    words: Sequence[str],
    path: str | Path,
    mode: str = "bag",
) -> None:
    """Upper-triangular CSV of pair scores for the requested word list."""
    header = "word," + ",".join(words) + "\n"
    rows = [header]
    for i, w1 in enumerate(words):
        cells: list[str] = [w1]
        for j, w2 in enumerate(words):
            if j < i:
                cells.append("")
            else:
                cells.append(repr(contextual_score(co, table, w1, w2, mode=mode)))
        rows.append(",".join(cells) + "\n")
    atomic_write_text(path, "".join(rows))
