#!/usr/bin/env python3
"""
STOL - 실행 스크립트

    python run.py synth --seed 7 --out data/run
    python run.py train-source --in data/run/source.jsonl --out data/run/source.model.json
    python run.py adapt --source-model data/run/source.model.json --in data/run/target.jsonl --out data/run/adapted.model.json
    python run.py eval --model data/run/adapted.model.json --in data/run/target.jsonl \\
        --truth data/run/target.truth.jsonl --unlabeled-only --out data/run/eval.json
"""

import sys

from stol.cli import main


if __name__ == "__main__":
    sys.exit(main())
