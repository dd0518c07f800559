"""Consistency and factuality metrics over paired responses.

Per-pair scores compare the two answers a model gave for one instance (one
per temporal reference) against each other and against the gold answer.
Aggregates are percentages rounded half-even to two decimals.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import (
    EmptyInput,
    LengthMismatch,
    MissingGold,
    UnknownInstanceId,
    ZeroVariance,
)
from .querygen import BenchmarkInstance

_ARTICLES = {"a", "an", "the"}
_PUNCT = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")


def normalize_answer(text: str) -> list[str]:
    """Lowercase, strip punctuation, drop articles; returns tokens."""
    cleaned = "".join(" " if ch in _PUNCT else ch for ch in text.lower())
    return [t for t in cleaned.split() if t not in _ARTICLES]


def exact_match(pred: str, gold: str) -> int:
    return int(normalize_answer(pred) == normalize_answer(gold))


def token_f1(pred: str, gold: str) -> float:
    """Multiset token overlap F1; both empty scores 1, only one empty 0."""
    pred_tokens = normalize_answer(pred)
    gold_tokens = normalize_answer(gold)
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    common = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if common == 0:
        return 0.0
    precision = common / len(pred_tokens)
    recall = common / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ResponsePair:
    instance_id: str
    answer_absolute: str
    answer_chronological: str

    def to_dict(self) -> dict:
        return {"instance_id": self.instance_id,
                "answer_absolute": self.answer_absolute,
                "answer_chronological": self.answer_chronological}


def _pct(x: float) -> float:
    return round(x, 2)


_SCORERS: dict[str, Callable[[str, str], float]] = {
    "em": exact_match,
    "f1": token_f1,
}


def score_deviation(absolute_scores: Sequence[float],
                    chronological_scores: Sequence[float]) -> float:
    """Mean absolute-arm score minus mean chronological-arm score, in percent."""
    if not absolute_scores or not chronological_scores:
        raise EmptyInput("no scores to aggregate")
    mean_a = sum(absolute_scores) / len(absolute_scores)
    mean_c = sum(chronological_scores) / len(chronological_scores)
    return _pct(100 * (mean_a - mean_c))


def _require_golds(pairs: Sequence[ResponsePair], golds: Mapping[str, str]):
    if not pairs:
        raise EmptyInput("no response pairs")
    for pair in pairs:
        if pair.instance_id not in golds:
            raise MissingGold(f"no gold answer for {pair.instance_id!r}")


def factual_deviation(pairs: Sequence[ResponsePair], golds: Mapping[str, str],
                      scorer: str = "em") -> float:
    _require_golds(pairs, golds)
    score = _SCORERS[scorer]
    abs_scores = [score(p.answer_absolute, golds[p.instance_id]) for p in pairs]
    chr_scores = [score(p.answer_chronological, golds[p.instance_id]) for p in pairs]
    return score_deviation(abs_scores, chr_scores)


def _identical(pair: ResponsePair, strict: bool) -> bool:
    if strict:
        return pair.answer_absolute == pair.answer_chronological
    return normalize_answer(pair.answer_absolute) == normalize_answer(pair.answer_chronological)


def referential_consistency(pairs: Sequence[ResponsePair], strict: bool = False) -> float:
    """Percentage of pairs answered identically across the two references."""
    if not pairs:
        raise EmptyInput("no response pairs")
    return _pct(100 * sum(_identical(p, strict) for p in pairs) / len(pairs))


def consistent_factuality(pairs: Sequence[ResponsePair], golds: Mapping[str, str],
                          strict: bool = False) -> float:
    """Percentage of pairs answered identically and correctly."""
    _require_golds(pairs, golds)
    hits = 0
    for pair in pairs:
        if not _identical(pair, strict):
            continue
        if strict:
            hits += pair.answer_absolute == golds[pair.instance_id]
        else:
            hits += exact_match(pair.answer_absolute, golds[pair.instance_id])
    return _pct(100 * hits / len(pairs))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)} values")
    if len(x) < 2:
        raise LengthMismatch("need at least two points")
    try:
        return statistics.correlation(x, y)
    except statistics.StatisticsError as exc:
        raise ZeroVariance(str(exc)) from exc


@dataclass
class EvalReport:
    em_ctr: float
    em_atr: float
    f1_ctr: float
    f1_atr: float
    dev_em: float
    dev_f1: float
    trc: float
    trcf: float
    m: int
    per_entity: dict[str, tuple[float, float, int]] = field(default_factory=dict)
    per_language: dict[str, tuple[float, float, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "em_ctr": self.em_ctr, "em_atr": self.em_atr,
            "f1_ctr": self.f1_ctr, "f1_atr": self.f1_atr,
            "dev_em": self.dev_em, "dev_f1": self.dev_f1,
            "trc": self.trc, "trcf": self.trcf, "m": self.m,
            "per_entity": {k: list(v) for k, v in self.per_entity.items()},
            "per_language": {k: list(v) for k, v in self.per_language.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            em_ctr=data["em_ctr"], em_atr=data["em_atr"],
            f1_ctr=data["f1_ctr"], f1_atr=data["f1_atr"],
            dev_em=data["dev_em"], dev_f1=data["dev_f1"],
            trc=data["trc"], trcf=data["trcf"], m=data["m"],
            per_entity={k: tuple(v) for k, v in data.get("per_entity", {}).items()},
            per_language={k: tuple(v) for k, v in data.get("per_language", {}).items()},
        )


def evaluate(dataset: Sequence[BenchmarkInstance], pairs: Sequence[ResponsePair],
             strict: bool = False) -> EvalReport:
    """Aggregate every metric plus per-entity-type and per-language breakdowns."""
    if not pairs:
        raise EmptyInput("no response pairs")
    by_id = {inst.id: inst for inst in dataset}
    for pair in pairs:
        if pair.instance_id not in by_id:
            raise UnknownInstanceId(f"response for unknown instance {pair.instance_id!r}")
    golds = {inst.id: inst.answer for inst in dataset}

    def mean_pct(scores):
        return _pct(100 * sum(scores) / len(scores))

    em_a = [exact_match(p.answer_absolute, golds[p.instance_id]) for p in pairs]
    em_c = [exact_match(p.answer_chronological, golds[p.instance_id]) for p in pairs]
    f1_a = [token_f1(p.answer_absolute, golds[p.instance_id]) for p in pairs]
    f1_c = [token_f1(p.answer_chronological, golds[p.instance_id]) for p in pairs]

    def breakdown(key: Callable[[BenchmarkInstance], str]):
        groups: dict[str, list[ResponsePair]] = {}
        for pair in pairs:
            groups.setdefault(key(by_id[pair.instance_id]), []).append(pair)
        return {
            name: (referential_consistency(group, strict),
                   consistent_factuality(group, golds, strict),
                   len(group))
            for name, group in groups.items()
        }

    em_ctr, em_atr = mean_pct(em_c), mean_pct(em_a)
    f1_ctr, f1_atr = mean_pct(f1_c), mean_pct(f1_a)
    return EvalReport(
        em_ctr=em_ctr, em_atr=em_atr,
        f1_ctr=f1_ctr, f1_atr=f1_atr,
        # derived from the rounded arms so the reported identity holds exactly
        dev_em=_pct(em_atr - em_ctr),
        dev_f1=_pct(f1_atr - f1_ctr),
        trc=referential_consistency(pairs, strict),
        trcf=consistent_factuality(pairs, golds, strict),
        m=len(pairs),
        per_entity=breakdown(lambda inst: inst.entity_type),
        per_language=breakdown(lambda inst: inst.language),
    )
