#!/usr/bin/env python3
"""
STOL - 평가 스크립트
source-only / target-only / adapted / pooled 모델의 target test 오차 비교 (seed별 + median)
"""

import argparse
import json
from datetime import datetime
from pathlib import Path
from statistics import median

from stol.config import configure_logging
from stol.experiment import METHODS, run_experiment
from stol.models import TrainConfig


DATA_DIR = Path(__file__).parent / "data"


def print_summary(evaluation: dict):
    """평가 결과 요약 출력"""
    print(f"\n{'='*60}")
    print("평가 결과 요약")
    print(f"{'='*60}")

    print(f"\n[seed별 target test 오차]")
    for trial in evaluation["trials"]:
        errors = " | ".join(f"{name}={trial['errors'][name]:.4f}" for name in METHODS)
        capped = [name for name in METHODS if not trial["runs"][name]["converged"]]
        note = f"  (iteration cap: {', '.join(capped)})" if capped else ""
        print(f"  seed {trial['seed']}: {errors}{note}")

    print(f"\n[방법별 median 오차]")
    for name in METHODS:
        print(f"  {name}: {evaluation['medians'][name]:.2%}")

    print(f"\n[방법별 median weight norm] (adapted: ||w||, 나머지: ||theta||)")
    for name in METHODS:
        norms = [trial["runs"][name]["weight_norm"] for trial in evaluation["trials"]]
        print(f"  {name}: {median(norms):.3f}")

    print(f"\n{'='*60}\n")


def save_report(evaluation: dict, args: argparse.Namespace, output_path: Path):
    """평가 보고서 저장"""
    report = {
        "timestamp": datetime.now().isoformat(),
        "settings": {
            "seeds": args.seeds,
            "n_source": args.n_source,
            "l": args.l,
            "n_test": args.n_test,
            "C": args.c,
        },
        "medians": evaluation["medians"],
        "trials": evaluation["trials"],
    }

    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(report, f, ensure_ascii=False, indent=2)

    print(f"평가 보고서 저장: {output_path}")


def main():
    parser = argparse.ArgumentParser(description="STOL transfer experiment")
    parser.add_argument("--seeds", type=int, default=11, help="실행할 seed 수 (0..seeds-1)")
    parser.add_argument("--n-source", type=int, default=200)
    parser.add_argument("--l", type=int, default=10, help="labeled target 샘플 수")
    parser.add_argument("--n-test", type=int, default=200)
    parser.add_argument("--c", type=float, default=None)
    parser.add_argument("--log", default=None)
    args = parser.parse_args()

    configure_logging(args.log)
    cfg = TrainConfig() if args.c is None else TrainConfig(C=args.c)
    args.c = cfg.C

    print("\nSTOL 평가 시작")
    print(f"시간: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print(f"seeds: {args.seeds}, n_source: {args.n_source}, l: {args.l}, n_test: {args.n_test}, C: {cfg.C:g}")

    evaluation = run_experiment(range(args.seeds), cfg=cfg,
                                n_source=args.n_source, l=args.l, n_test=args.n_test)

    # 결과 요약 출력
    print_summary(evaluation)

    # 보고서 저장
    report_path = DATA_DIR / f"evaluation_report_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
    save_report(evaluation, args, report_path)

    print("평가 완료!")


if __name__ == "__main__":
    main()
