"""Two-class Tsetlin machine over boolean word vectors.

Each class owns a pool of conjunctive clauses (half voting for the class,
half against).  A clause is a team of two-action automata, one per literal
(every feature and its negation); a literal is part of the conjunction
whenever its automaton state is on the include side.  Clause evaluation is
bit-packed: include masks and input literals are stored as 64-bit blocks and
a clause fires iff ``include & ~literals`` is all zero.

Training follows the classic two-feedback scheme.  Type I feedback breeds
frequent patterns: on a firing clause, true literals are reinforced toward
include with probability (s-1)/s and false literals pushed toward exclude
with probability 1/s; on a silent clause every state decays toward exclude
with probability 1/s.  Type II feedback sharpens discrimination: a firing
clause deterministically nudges every excluded false literal one step toward
include, planting a blocker.  Per document, the labeled class receives
Type I on its for-votes and Type II on its firing against-votes, each clause
independently with probability (T - clamp(sum))/(2T); the opposite class
receives the mirrored treatment with probability (T + clamp(sum))/(2T).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from ._files import atomic_write_bytes
from .corpus import BoolDoc, Label, Vocabulary

_MODEL_FORMAT = "tmnovelty-model"
_MODEL_VERSION = 1


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class EvalMode(Enum):
    """Empty clauses (no included literal) fire in LEARNING, never in INFERENCE."""

    LEARNING = "learning"
    INFERENCE = "inference"


@dataclass(frozen=True)
class TMParams:
    """Hyperparameters: clause pool size, vote margin, sensitivity, automaton depth."""

    clause_count: int = 10_000
    vote_margin: int = 50
    sensitivity: float = 25.0
    state_count: int = 128  # states per action; TA state ranges over [1, 2*state_count]
    seed: int = 0

    def __post_init__(self) -> None:
        if self.clause_count < 2 or self.clause_count % 2 != 0:
            raise ValueError("clause_count must be an even integer >= 2")
        if self.vote_margin < 1:
            raise ValueError("vote_margin must be >= 1")
        if not self.sensitivity > 1.0:
            raise ValueError("sensitivity must be > 1")
        if self.state_count < 1:
            raise ValueError("state_count must be >= 1")


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean array's last axis into little-endian 64-bit words."""
    bits = np.asarray(bits, dtype=bool)
    pad = (-bits.shape[-1]) % 64
    if pad:
        widths = [(0, 0)] * (bits.ndim - 1) + [(0, pad)]
        bits = np.pad(bits, widths)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64)


def literal_vector(bits: np.ndarray) -> np.ndarray:
    """Concatenate features with their negations: [x_1..x_o, ~x_1..~x_o]."""
    bits = np.asarray(bits, dtype=bool)
    return np.concatenate([bits, ~bits], axis=-1)


class ClauseBank:
    """TA states for one class's clause pool; first half positive polarity."""

    def __init__(
        self,
        clause_count: int,
        feature_count: int,
        state_count: int,
        init: str = "deep",
        rng: np.random.Generator | None = None,
    ) -> None:
        if clause_count % 2 != 0:
            raise ValueError("clause_count must be even")
        self.clause_count = clause_count
        self.feature_count = feature_count
        self.literal_count = 2 * feature_count
        self.state_count = state_count
        n = state_count
        if init == "deep":
            # Exclude side, one step from include: the common starting point.
            self.state = np.full((clause_count, self.literal_count), n, dtype=np.int16)
        elif init == "random":
            if rng is None:
                raise ValueError("random init requires an rng")
            self.state = rng.integers(n, n + 2, size=(clause_count, self.literal_count), dtype=np.int16)
        else:
            raise ValueError(f"unknown init {init!r}")
        self.positive_mask = np.zeros(clause_count, dtype=bool)
        self.positive_mask[: clause_count // 2] = True
        self._cache_version = -1
        self._version = 0

    # -- include-side views -------------------------------------------------

    def include_mask(self) -> np.ndarray:
        """Boolean (clauses, literals) matrix of include actions, derived from states."""
        self._refresh()
        return self._include

    def _refresh(self) -> None:
        if self._cache_version != self._version:
            self._include = self.state > self.state_count
            self._include_packed = pack_bits(self._include)
            self._nonempty = self._include.any(axis=1)
            self._cache_version = self._version

    def _touch(self) -> None:
        self._version += 1

    # -- evaluation ----------------------------------------------------------

    def fired(self, not_literals_packed: np.ndarray, mode: EvalMode) -> np.ndarray:
        """Evaluate all clauses on one input given pack_bits(~literals)."""
        self._refresh()
        violated = np.bitwise_and(self._include_packed, not_literals_packed).any(axis=1)
        out = ~violated
        if mode is EvalMode.INFERENCE:
            out &= self._nonempty
        return out

    def fired_batch(self, literals_matrix: np.ndarray, mode: EvalMode) -> np.ndarray:
        """Evaluate all clauses on a (docs, literals) matrix; returns (docs, clauses).

        Uses an integer matmul: a clause fails on a document iff it includes
        at least one false literal, i.e. include . (1 - literals) > 0.
        """
        self._refresh()
        misses = (~literals_matrix).astype(np.float32) @ self._include.astype(np.float32).T
        out = misses == 0.0
        if mode is EvalMode.INFERENCE:
            out &= self._nonempty[None, :]
        return out

    def vote_sum(self, fired: np.ndarray) -> int:
        half = self.clause_count // 2
        return int(fired[:half].sum()) - int(fired[half:].sum())

    def vote_sums_batch(self, fired: np.ndarray) -> np.ndarray:
        half = self.clause_count // 2
        return fired[:, :half].sum(axis=1).astype(np.int64) - fired[:, half:].sum(axis=1)

    # -- feedback ------------------------------------------------------------

    def type_i(
        self,
        fired_rows: np.ndarray,
        silent_rows: np.ndarray,
        literals: np.ndarray,
        sensitivity: float,
        rng: np.random.Generator,
    ) -> None:
        """Apply Type I feedback to the given clause rows (fired and silent)."""
        low, high = 1, 2 * self.state_count
        p_reinforce = (sensitivity - 1.0) / sensitivity
        p_forget = 1.0 / sensitivity
        if fired_rows.size:
            draw = rng.random((fired_rows.size, self.literal_count))
            up = literals[None, :] & (draw < p_reinforce)
            down = ~literals[None, :] & (draw < p_forget)
            block = self.state[fired_rows] + up.astype(np.int16) - down.astype(np.int16)
            np.clip(block, low, high, out=block)
            self.state[fired_rows] = block
        if silent_rows.size:
            down = rng.random((silent_rows.size, self.literal_count)) < p_forget
            block = self.state[silent_rows] - down.astype(np.int16)
            np.clip(block, low, high, out=block)
            self.state[silent_rows] = block
        if fired_rows.size or silent_rows.size:
            self._touch()

    def type_ii(self, fired_rows: np.ndarray, literals: np.ndarray) -> None:
        """Nudge every excluded false literal of the given firing rows toward include."""
        if not fired_rows.size:
            return
        block = self.state[fired_rows]
        bump = ~literals[None, :] & (block <= self.state_count)
        self.state[fired_rows] = block + bump.astype(np.int16)
        self._touch()

    # -- fixture helpers -----------------------------------------------------

    def set_clause(self, index: int, plain: Sequence[int] = (), negated: Sequence[int] = ()) -> None:
        """Hand-set one clause: listed literals to deep include, the rest deep exclude."""
        self.state[index, :] = 1
        for f in plain:
            self.state[index, f] = 2 * self.state_count
        for f in negated:
            self.state[index, self.feature_count + f] = 2 * self.state_count
        self._touch()


@dataclass
class TMModel:
    """Two clause banks (one per document group) plus the shared hyperparameters."""

    params: TMParams
    feature_count: int
    banks: dict[Label, ClauseBank]
    vocab_hash: str = ""

    @classmethod
    def create(
        cls,
        params: TMParams,
        feature_count: int,
        vocab_hash: str = "",
        init: str = "deep",
    ) -> "TMModel":
        rng = np.random.default_rng(params.seed) if init == "random" else None
        banks = {
            label: ClauseBank(params.clause_count, feature_count, params.state_count, init=init, rng=rng)
            for label in (Label.KNOWN, Label.NOVEL)
        }
        return cls(params=params, feature_count=feature_count, banks=banks, vocab_hash=vocab_hash)

    def save(self, path: str | Path) -> None:
        header = {
            "format": _MODEL_FORMAT,
            "version": _MODEL_VERSION,
            "params": {
                "clause_count": self.params.clause_count,
                "vote_margin": self.params.vote_margin,
                "sensitivity": self.params.sensitivity,
                "state_count": self.params.state_count,
                "seed": self.params.seed,
            },
            "feature_count": self.feature_count,
            "vocab_hash": self.vocab_hash,
            "state_dtype": "<i2",
            "class_order": [label.value for label in (Label.KNOWN, Label.NOVEL)],
        }
        blob = bytearray(json.dumps(header, sort_keys=True).encode("utf-8"))
        blob += b"\n"
        for label in (Label.KNOWN, Label.NOVEL):
            blob += np.ascontiguousarray(self.banks[label].state, dtype="<i2").tobytes()
        atomic_write_bytes(path, bytes(blob))

    @classmethod
    def load(cls, path: str | Path) -> "TMModel":
        raw = Path(path).read_bytes()
        newline = raw.index(b"\n")
        header = json.loads(raw[:newline].decode("utf-8"))
        if header.get("format") != _MODEL_FORMAT:
            raise ValueError(f"not a model file: {path}")
        if header.get("version") != _MODEL_VERSION:
            raise ValueError(f"unsupported model version {header.get('version')!r}")
        params = TMParams(**header["params"])
        feature_count = header["feature_count"]
        model = cls.create(params, feature_count, vocab_hash=header["vocab_hash"])
        n_lit = 2 * feature_count
        span = params.clause_count * n_lit * 2  # int16 bytes per bank
        offset = newline + 1
        for label in (Label.KNOWN, Label.NOVEL):
            chunk = raw[offset : offset + span]
            if len(chunk) != span:
                raise ValueError(f"truncated model file: {path}")
            states = np.frombuffer(chunk, dtype="<i2").reshape(params.clause_count, n_lit)
            model.banks[label].state = states.astype(np.int16)
            model.banks[label]._touch()
            offset += span
        return model


# ---------------------------------------------------------------------------
# Single-clause operations (the contract surface; the bank methods above are
# the vectorized forms used by training).
# ---------------------------------------------------------------------------


def clause_eval(bank: ClauseBank, index: int, bits: np.ndarray, mode: EvalMode) -> bool:
    """Evaluate one clause on one input bit vector."""
    if bits.shape[-1] != bank.feature_count:
        raise ValueError(f"input width {bits.shape[-1]} != clause width {bank.feature_count}")
    nl = pack_bits(~literal_vector(bits))
    return bool(bank.fired(nl, mode)[index])


def type_i_feedback(
    bank: ClauseBank,
    index: int,
    bits: np.ndarray,
    sensitivity: float,
    rng: np.random.Generator,
) -> None:
    """Apply Type I feedback to one clause, branching on its learning-mode output."""
    lits = literal_vector(bits)
    fired = bank.fired(pack_bits(~lits), EvalMode.LEARNING)[index]
    row = np.array([index])
    empty = np.empty(0, dtype=np.int64)
    if fired:
        bank.type_i(row, empty, lits, sensitivity, rng)
    else:
        bank.type_i(empty, row, lits, sensitivity, rng)


def type_ii_feedback(bank: ClauseBank, index: int, bits: np.ndarray) -> None:
    """Apply Type II feedback to one clause; the clause must fire on the input."""
    lits = literal_vector(bits)
    if not bank.fired(pack_bits(~lits), EvalMode.LEARNING)[index]:
        raise ValueError("type II feedback requires a firing clause")
    bank.type_ii(np.array([index]), lits)


@dataclass(frozen=True)
class ClassSum:
    """Clause vote sum for one class: clamped for feedback, raw for diagnostics."""

    clamped: int
    raw: int


def class_sum(model: TMModel, bits: np.ndarray, label: Label, mode: EvalMode = EvalMode.INFERENCE) -> ClassSum:
    bank = model.banks[label]
    if bits.shape[-1] != model.feature_count:
        raise ValueError(f"input width {bits.shape[-1]} != model width {model.feature_count}")
    fired = bank.fired(pack_bits(~literal_vector(bits)), mode)
    raw = bank.vote_sum(fired)
    margin = model.params.vote_margin
    return ClassSum(clamped=int(np.clip(raw, -margin, margin)), raw=raw)


def classify(model: TMModel, bits: np.ndarray) -> Label:
    """Pick the class with the larger vote sum; ties go to KNOWN."""
    known = class_sum(model, bits, Label.KNOWN).raw
    novel = class_sum(model, bits, Label.NOVEL).raw
    return Label.NOVEL if novel > known else Label.KNOWN


def classify_batch(model: TMModel, bits_matrix: np.ndarray) -> np.ndarray:
    """Vectorized classify over a (docs, features) matrix; True = NOVEL."""
    lits = literal_vector(bits_matrix)
    sums = {
        label: model.banks[label].vote_sums_batch(model.banks[label].fired_batch(lits, EvalMode.INFERENCE))
        for label in (Label.KNOWN, Label.NOVEL)
    }
    return sums[Label.NOVEL] > sums[Label.KNOWN]


def fit(
    model: TMModel,
    docs: Sequence[BoolDoc],
    epochs: int,
    early_stop_accuracy: float | None = None,
) -> tuple[TMModel, list[float]]:
    """Train in place over shuffled epochs; returns the model and accuracy trace.

    ``early_stop_accuracy`` ends training once the post-epoch training
    accuracy reaches the given level (the trace keeps what was recorded).
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    labels = {doc.label for doc in docs}
    if labels != {Label.KNOWN, Label.NOVEL}:
        raise ValueError("both classes required")
    for doc in docs:
        if doc.bits.shape[-1] != model.feature_count:
            raise ValueError(f"document {doc.doc_id!r} width != model width")

    bits_matrix = np.stack([doc.bits for doc in docs]).astype(bool)
    lits_matrix = literal_vector(bits_matrix)
    not_packed = pack_bits(~lits_matrix)
    is_novel = np.array([doc.label is Label.NOVEL for doc in docs])

    rng = np.random.default_rng(model.params.seed)
    order_banks = (model.banks[Label.KNOWN], model.banks[Label.NOVEL])
    margin = model.params.vote_margin
    s = model.params.sensitivity

    trace: list[float] = []
    for _ in range(epochs):
        for d in rng.permutation(len(docs)):
            target = int(is_novel[d])
            _feedback_step(order_banks[target], lits_matrix[d], not_packed[d], True, margin, s, rng)
            _feedback_step(order_banks[1 - target], lits_matrix[d], not_packed[d], False, margin, s, rng)
        accuracy = float(np.mean(classify_batch(model, bits_matrix) == is_novel))
        trace.append(accuracy)
        if early_stop_accuracy is not None and accuracy >= early_stop_accuracy:
            break
    return model, trace


def _feedback_step(
    bank: ClauseBank,
    literals: np.ndarray,
    not_packed: np.ndarray,
    toward: bool,
    margin: int,
    s: float,
    rng: np.random.Generator,
) -> None:
    fired = bank.fired(not_packed, EvalMode.LEARNING)
    clamped = max(-margin, min(margin, bank.vote_sum(fired)))
    if toward:
        update_p = (margin - clamped) / (2.0 * margin)
    else:
        update_p = (margin + clamped) / (2.0 * margin)
    selected = rng.random(bank.clause_count) < update_p
    if toward:
        type_i_pool = selected & bank.positive_mask
        type_ii_pool = selected & ~bank.positive_mask & fired
    else:
        type_i_pool = selected & ~bank.positive_mask
        type_ii_pool = selected & bank.positive_mask & fired
    bank.type_i(
        np.flatnonzero(type_i_pool & fired),
        np.flatnonzero(type_i_pool & ~fired),
        literals,
        s,
        rng,
    )
    bank.type_ii(np.flatnonzero(type_ii_pool), literals)


@dataclass(frozen=True)
class ExtractedClause:
    """A trained clause reduced to its word sets for downstream description."""

    label: Label
    polarity: Polarity
    index: int
    plain_words: frozenset[str]
    negated_words: frozenset[str]


def extract_clauses(model: TMModel, vocab: Vocabulary) -> list[ExtractedClause]:
    """Read the include actions of every clause back as plain/negated word sets.

    Clauses with no included literal are omitted.  A word may appear on both
    sides of one clause if training included both the feature and its
    negation; that is surfaced as-is.
    """
    if len(vocab) != model.feature_count:
        raise ValueError("vocabulary size != model feature count")
    out: list[ExtractedClause] = []
    half = model.params.clause_count // 2
    o = model.feature_count
    for label in (Label.KNOWN, Label.NOVEL):
        include = model.banks[label].include_mask()
        for j in range(model.params.clause_count):
            plain_idx = np.flatnonzero(include[j, :o])
            negated_idx = np.flatnonzero(include[j, o:])
            if plain_idx.size == 0 and negated_idx.size == 0:
                continue
            out.append(
                ExtractedClause(
                    label=label,
                    polarity=Polarity.POSITIVE if j < half else Polarity.NEGATIVE,
                    index=j,
                    plain_words=frozenset(vocab.words[i] for i in plain_idx),
                    negated_words=frozenset(vocab.words[i] for i in negated_idx),
                )
            )
    return out


def write_clause_dump(clauses: Sequence[ExtractedClause], path: str | Path) -> None:
    """CSV dump: class, polarity, clause_index, plain and negated words ';'-joined."""
    rows = ["class,polarity,clause_index,plain_words,negated_words\n"]
    for c in clauses:
        plain = ";".join(sorted(c.plain_words))
        negated = ";".join(sorted(c.negated_words))
        rows.append(f"{c.label.value},{c.polarity.value},{c.index},{plain},{negated}\n")
    atomic_write_bytes(path, "".join(rows).encode("utf-8"))
