"""Prompt rendering and instruction-tuning export.

Demonstration selection for the "semantic" styles uses IDF-weighted cosine
similarity over bag-of-words vectors: deterministic and dependency-free.
"""

from __future__ import annotations

import math
import random
import re
from collections import Counter
from dataclasses import dataclass, field

from .errors import PairingViolation, PoolTooSmall
from .querygen import BenchmarkInstance

STYLE_KINDS = ("zero_shot", "icl", "semantic_icl", "semantic_cot")
REFERENCE_KINDS = ("absolute", "chronological")
PAIRINGS = ("cross", "unilateral_absolute")

# Under cross pairing each reference kind is matched with its aligned rationale:
# absolute queries with the event-oriented pathway, chronological with the
# time-oriented one.
PATHWAY_FOR_REFERENCE = {"absolute": "event", "chronological": "time"}

DEFAULT_INSTRUCTION = (
    "Answer the temporal question. Reason about which fact holds immediately "
    "before or after the given reference, then state only the answer entity."
)


@dataclass(frozen=True)
class PromptStyle:
    kind: str = "icl"
    shots: int = 3

    def __post_init__(self):
        if self.kind not in STYLE_KINDS:
            raise ValueError(f"unknown prompt style {self.kind!r}")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.kind == "zero_shot":
            object.__setattr__(self, "shots", 0)


@dataclass(frozen=True)
class SftRecord:
    instruction: str
    input: str
    output: str
    pairing: str

    def to_dict(self) -> dict:
        return {"instruction": self.instruction, "input": self.input,
                "output": self.output, "pairing": self.pairing}


_TOKEN_RX = re.compile(r"[^\w\s]")


def _tokens(text: str) -> list[str]:
    return _TOKEN_RX.sub(" ", text.lower()).split()


@dataclass
class IdfIndex:
    """Immutable per-pool IDF table; built once, shared across lookups."""

    idf: dict[str, float] = field(default_factory=dict)
    n_docs: int = 0

    @classmethod
    def build(cls, texts: list[str]) -> "IdfIndex":
        df: Counter = Counter()
        for text in texts:
            df.update(set(_tokens(text)))
        n = len(texts)
        idf = {t: math.log((1 + n) / (1 + c)) + 1.0 for t, c in df.items()}
        return cls(idf, n)

    def vector(self, text: str) -> dict[str, float]:
        tf = Counter(_tokens(text))
        return {t: c * self.idf.get(t, math.log(1 + self.n_docs) + 1.0)
                for t, c in tf.items()}


def _cosine(a: dict[str, float], b: dict[str, float]) -> float:
    if not a or not b:
        return 0.0
    dot = sum(v * b[t] for t, v in a.items() if t in b)
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    return dot / (na * nb) if dot else 0.0


def select_demonstrations(pool: list[BenchmarkInstance], query: str,
                          style: PromptStyle, seed: int,
                          reference_kind: str = "chronological",
                          ) -> list[BenchmarkInstance]:
    """Pick `style.shots` demos from the pool (assumed language-filtered)."""
    if style.shots == 0:
        return []
    if len(pool) < style.shots:
        raise PoolTooSmall(f"pool of {len(pool)} cannot supply {style.shots} shots")
    if style.kind == "icl":
        return random.Random(seed).sample(pool, style.shots)
    # semantic styles: IDF-weighted cosine, ties broken by pool order
    texts = [inst.query(reference_kind) for inst in pool]
    index = IdfIndex.build(texts)
    qvec = index.vector(query)
    scored = sorted(
        enumerate(pool),
        key=lambda pair: (-_cosine(qvec, index.vector(texts[pair[0]])), pair[0]),
    )
    return [inst for _, inst in scored[: style.shots]]


def render_prompt(query: str, demos: list[BenchmarkInstance],
                  style: PromptStyle, reference_kind: str) -> str:
    """Question/answer demonstration blocks followed by the target query."""
    if len(demos) != style.shots:
        raise ValueError(f"expected {style.shots} demos, got {len(demos)}")
    if reference_kind not in REFERENCE_KINDS:
        raise ValueError(f"unknown reference kind {reference_kind!r}")
    blocks = []
    for demo in demos:
        lines = [f"Question: {demo.query(reference_kind)}"]
        if style.kind == "semantic_cot":
            lines.append(f"Reasoning: {demo.pathway(PATHWAY_FOR_REFERENCE[reference_kind])}")
        lines.append(f"Answer: {demo.answer}")
        blocks.append("\n".join(lines))
    blocks.append(f"Question: {query}\nAnswer:")
    return "\n\n".join(blocks)


def render_sft_record(instance: BenchmarkInstance, reference_kind: str,
                      pairing: str, instruction: str = DEFAULT_INSTRUCTION) -> SftRecord:
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown pairing {pairing!r}")
    if reference_kind not in REFERENCE_KINDS:
        raise ValueError(f"unknown reference kind {reference_kind!r}")
    if pairing == "unilateral_absolute" and reference_kind != "absolute":
        raise PairingViolation("unilateral export only covers absolute queries")
    pathway = instance.pathway(PATHWAY_FOR_REFERENCE[reference_kind])
    return SftRecord(
        instruction=instruction,
        input=instance.query(reference_kind),
        output=f"{pathway}\n{instance.answer.lower()}",
        pairing=pairing,
    )


def export_sft(instances: list[BenchmarkInstance], pairing: str,
               instruction: str = DEFAULT_INSTRUCTION) -> list[SftRecord]:
    """Cross pairing emits two records per instance, unilateral one."""
    records = []
    for inst in instances:
        records.append(render_sft_record(inst, "absolute", pairing, instruction))
        if pairing == "cross":
            records.append(render_sft_record(inst, "chronological", pairing, instruction))
    return records
