"""Shared fixtures: the sports case-study clauses and a hand-set model."""

from __future__ import annotations

from tmnovelty.corpus import Label, Vocabulary
from tmnovelty.tsetlin import ExtractedClause, Polarity, TMModel, TMParams

# Ten-word vocabulary of the two-sentence cricket/rugby case study.
CASE_STUDY_WORDS = (
    "ball",
    "cricket",
    "despite",
    "england",
    "hit",
    "match",
    "old",
    "rugby",
    "six",
    "won",
)

# The eight golden clauses: two for-votes and two against-votes per class,
# all plain words.  Against-votes for one class describe the other class.
_CASE_STUDY_SPEC = (
    (Label.KNOWN, Polarity.POSITIVE, ("england", "cricket", "match", "hit", "six")),
    (Label.KNOWN, Polarity.POSITIVE, ("cricket", "six")),
    (Label.KNOWN, Polarity.NEGATIVE, ("won", "rugby", "ball")),
    (Label.KNOWN, Polarity.NEGATIVE, ("rugby", "match")),
    (Label.NOVEL, Polarity.POSITIVE, ("england", "won", "rugby", "old")),
    (Label.NOVEL, Polarity.POSITIVE, ("rugby", "match", "despite", "old")),
    (Label.NOVEL, Polarity.NEGATIVE, ("cricket", "won", "six", "ball")),
    (Label.NOVEL, Polarity.NEGATIVE, ("cricket", "hit", "six")),
)

EXPECTED_BAG_KNOWN = {
    "cricket": 4,
    "six": 4,
    "hit": 2,
    "england": 1,
    "match": 1,
    "won": 1,
    "ball": 1,
}
EXPECTED_BAG_NOVEL = {
    "rugby": 4,
    "won": 2,
    "match": 2,
    "old": 2,
    "england": 1,
    "despite": 1,
    "ball": 1,
}


def case_study_vocab() -> Vocabulary:
    return Vocabulary(CASE_STUDY_WORDS)


def case_study_clauses() -> list[ExtractedClause]:
    clauses = []
    index = {Label.KNOWN: {Polarity.POSITIVE: 0, Polarity.NEGATIVE: 2},
             Label.NOVEL: {Polarity.POSITIVE: 0, Polarity.NEGATIVE: 2}}
    for label, polarity, plain in _CASE_STUDY_SPEC:
        clauses.append(
            ExtractedClause(
                label=label,
                polarity=polarity,
                index=index[label][polarity],
                plain_words=frozenset(plain),
                negated_words=frozenset(),
            )
        )
        index[label][polarity] += 1
    return clauses


def case_study_model(seed: int = 0) -> TMModel:
    """Hand-set TA states reproducing the case-study clauses (4 per class)."""
    vocab = case_study_vocab()
    params = TMParams(clause_count=4, vote_margin=5, sensitivity=3.0, state_count=8, seed=seed)
    model = TMModel.create(params, len(vocab), vocab_hash=vocab.sha256())
    next_row = {
        (label, polarity): (0 if polarity is Polarity.POSITIVE else params.clause_count // 2)
        for label in (Label.KNOWN, Label.NOVEL)
        for polarity in (Polarity.POSITIVE, Polarity.NEGATIVE)
    }
    for label, polarity, plain in _CASE_STUDY_SPEC:
        row = next_row[(label, polarity)]
        next_row[(label, polarity)] += 1
        model.banks[label].set_clause(row, plain=[vocab.index_of[w] for w in plain])
    return model
