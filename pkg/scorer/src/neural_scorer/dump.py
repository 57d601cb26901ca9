"""Offline run dumper: score every (fragment, paragraph) pair of a dataset
directory and write a run file.

Reads the shared dataset layout (``<root>/<entry>/entailed_fragment.txt``
plus ``<root>/<entry>/paragraphs/*.txt``) and emits one line per pair:
``entry_id<TAB>candidate_id<TAB>score<TAB>model_id`` with LF endings.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from neural_scorer.model import RelevanceScorer


def read_text(path: Path) -> str:
    content = path.read_text(encoding="utf-8")
    return content[:-1] if content.endswith("\n") else content


def iter_pairs(root: Path):
    for entry_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        fragment = read_text(entry_dir / "entailed_fragment.txt")
        for para in sorted((entry_dir / "paragraphs").glob("*.txt")):
            yield entry_dir.name, para.stem, fragment, read_text(para)


def dump_run(root: Path, out_path: Path, model_id: str,
             scorer: RelevanceScorer | None = None) -> int:
    scorer = scorer or RelevanceScorer()
    n_lines = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for entry_id, candidate_id, fragment, paragraph in iter_pairs(root):
            result = scorer.score_pair(fragment, paragraph)
            fh.write(f"{entry_id}\t{candidate_id}\t{result.score!r}\t{model_id}\n")
            n_lines += 1
    return n_lines


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="neural-scorer-dump")
    parser.add_argument("--data", required=True, help="dataset root directory")
    parser.add_argument("--out", required=True, help="run file to write")
    parser.add_argument("--model-id", default="neural")
    args = parser.parse_args(argv)
    n = dump_run(Path(args.data), Path(args.out), args.model_id)
    print(f"wrote {n} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
