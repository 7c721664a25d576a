"""Deterministic paired corpus for desk-scale decoding experiments.

Each example is one sentence with two slot words that come in a simple and
a complex variant, e.g. "check" against "verification".  Per-example
training texts repeat the complex sentence 26 times and the simple one 24
times, so a bigram model puts near-equal probability on the two slot
fillers with a slight edge to the complex one: vanilla log-probability
decoding picks the complex sentence, composite reranking picks the simple
one.  The repeat counts also make any off-template entry ride on smoothing
mass alone, which costs more log probability than a whole canonical
sentence, so degenerate short decodes never win.

The source text contains every simple-sentence word in a different word
order (no shared 4-gram) plus filler words that never occur in the
training targets, hence can never be generated.  The label is the simple
sentence.

Everything is deterministic: 10 word bundles crossed with 20 subjects gives
200 distinct examples.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Document

__all__ = ["SyntheticExample", "make_examples", "SUBJECTS", "BUNDLES"]

SIMPLE_REPEATS = 24
COMPLEX_REPEATS = 26

# (simple-1, complex-1, simple-2, complex-2): one-syllable simple words,
# four-plus-syllable complex words.  Chosen so no slot word shares a
# character trigram with another template or filler word: similarity
# credit then never leaks across words, and a complex pick gains nothing
# from its simple sibling in the source.
BUNDLES = (
    ("use", "utilization", "help", "facilitation"),
    ("start", "initialization", "halt", "termination"),
    ("check", "verification", "test", "examination"),
    ("dose", "administration", "pain", "inflammation"),
    ("cut", "amputation", "fix", "rehabilitation"),
    ("speak", "communication", "walk", "ambulation"),
    ("gasp", "ventilation", "feed", "alimentation"),
    ("wash", "sterilization", "wrap", "immobilization"),
    ("rest", "recuperation", "heal", "regeneration"),
    ("file", "documentation", "sort", "categorization"),
)

SUBJECTS = (
    "nurses",
    "doctors",
    "carers",
    "medics",
    "teams",
    "aides",
    "interns",
    "fellows",
    "porters",
    "clerks",
    "tutors",
    "mentors",
    "scouts",
    "chiefs",
    "wards",
    "leads",
    "locums",
    "techs",
    "heads",
    "crews",
)


@dataclass(frozen=True)
class SyntheticExample:
    """One paired example plus the texts its language model trains on."""

    document: Document
    training_texts: tuple[str, ...]
    simple_text: str
    complex_text: str


def _sentence(subject: str, first: str, second: str) -> str:
    return f"{subject} can {first} and {second} the care plan now"


def _source(subject: str, bundle: tuple[str, str, str, str]) -> str:
    # Simple variants only: the complex words are unsupported by the
    # source, so precision drops when the decoder picks them.  The seven
    # filler words (the subject-independent ones outside the sentence
    # template) widen the source so short beam prefixes sit safely below
    # the consistent-recall floor while full sentences clear it.
    s1, _, s2, _ = bundle
    return (
        f"the care unit said {subject} can now plan with "
        f"{s1} and {s2} for all sites daily"
    )


def make_examples(count: int = 200) -> list[SyntheticExample]:
    """First ``count`` examples of the 200-example corpus."""
    if not 1 <= count <= len(BUNDLES) * len(SUBJECTS):
        raise ValueError(
            f"count must be in 1..{len(BUNDLES) * len(SUBJECTS)}, got {count}"
        )
    examples = []
    index = 0
    for bundle in BUNDLES:
        s1, c1, s2, c2 = bundle
        for subject in SUBJECTS:
            if index >= count:
                return examples
            simple = _sentence(subject, s1, s2)
            complex_ = _sentence(subject, c1, c2)
            document = Document(
                id=f"doc{index:03d}",
                input=_source(subject, bundle),
                label=simple,
            )
            training = (simple,) * SIMPLE_REPEATS + (complex_,) * COMPLEX_REPEATS
            examples.append(
                SyntheticExample(
                    document=document,
                    training_texts=training,
                    simple_text=simple,
                    complex_text=complex_,
                )
            )
            index += 1
    return examples
