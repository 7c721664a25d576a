#!/usr/bin/env python3
"""Write the deterministic synthetic corpus as JSONL.

The emitted file is what ``simpkit decode --corpus`` and friends read: one
{"id", "input", "label"} object per line.  Per-example training texts are
not part of the corpus format; experiments that need them rebuild the
examples with :func:`simpkit.synthetic.make_examples`.
"""

import argparse

from simpkit.corpus import dump_jsonl
from simpkit.synthetic import make_examples


def main() -> None:
    parser = argparse.ArgumentParser(
        description="write the synthetic corpus as JSONL"
    )
    parser.add_argument(
        "--count", type=int, default=200,
        help="number of examples, at most 200 (default: 200)",
    )
    parser.add_argument(
        "--out", default="synthetic_corpus.jsonl",
        help="output path (default: synthetic_corpus.jsonl)",
    )
    args = parser.parse_args()

    examples = make_examples(args.count)
    dump_jsonl([ex.document for ex in examples], args.out)
    print(f"wrote {len(examples)} documents to {args.out}")


if __name__ == "__main__":
    main()
