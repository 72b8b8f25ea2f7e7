"""
STOL - Command Line Interface

    synth         source/target 합성 데이터 생성
    train-source  source 모델 학습 (1-slack structural SVM)
    adapt         frozen source 위에 delta 함수 학습
    predict       모델로 레이블 시퀀스 예측
    eval          평균 정규화 Hamming 오차 평가

Exit codes: 0 성공/수렴, 2 사용법/데이터 오류, 3 iteration cap 도달, 1 solver 실패.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from .chain_model import Dataset, LinearScorer, scorer_weights
from .config import configure_logging, settings
from .data_loader import (read_dataset, read_labels, read_model, write_dataset, write_json,
                          write_model, write_predictions)
from .datagen import default_params, generate, mask_labels, shift
from .errors import DataError, SolverError
from .inference import decode, hamming_loss
from .models import (AdaptConfig, EvalConfig, EvalMetrics, PredictConfig, SynthConfig, TrainConfig,
                     TrainReport, TrainSourceConfig)
from .trainer import adapt, train_source

logger = logging.getLogger("stol.cli")

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_DATA = 2
EXIT_ITERATION_CAP = 3


# === Helpers ===

def _require_file(path: str, what: str) -> None:
    if not Path(path).is_file():
        raise DataError(f"{what} not found: {path}")


def _require_parent(path: str) -> None:
    parent = Path(path).parent
    if not parent.is_dir():
        raise DataError(f"output directory does not exist: {parent}")


def _report_path(cfg: TrainSourceConfig) -> str:
    return cfg.report or str(Path(cfg.out).with_suffix(".report.json"))


def _train_config(cfg: TrainConfig) -> TrainConfig:
    """실행 설정에서 학습 설정만 분리"""
    return TrainConfig(C=cfg.C, eps_cp=cfg.eps_cp, eps_qp=cfg.eps_qp, max_cp_iters=cfg.max_cp_iters)


def _check_dims(dataset: Dataset, d: int, K: int, path: str) -> None:
    if (dataset.d, dataset.K) != (d, K):
        raise DataError(f"{path} has d={dataset.d}, K={dataset.K} but the model expects d={d}, K={K}")


def _exit_for(report: TrainReport) -> int:
    return EXIT_OK if report.terminated_by == "converged" else EXIT_ITERATION_CAP


# === Commands ===

def cmd_synth(cfg: SynthConfig) -> int:
    """source.jsonl, target.jsonl, target.truth.jsonl, synth.json 생성"""
    out_dir = Path(cfg.out)
    if not out_dir.is_dir():
        raise DataError(f"output directory does not exist: {out_dir}")

    source_params = default_params(sigma=cfg.sigma)
    target_params = shift(source_params, cfg.rotation, cfg.translation)
    s_source, s_target, s_mask = (int(s) for s in np.random.SeedSequence(cfg.seed).generate_state(3))

    source = generate(source_params, cfg.n_source, s_source, "source")
    target = generate(target_params, cfg.n_target, s_target, "target")
    masked, truth = mask_labels(target, cfg.l, s_mask)

    write_dataset(out_dir / "source.jsonl", source, params=source_params.model_dump(), seed=cfg.seed)
    write_dataset(out_dir / "target.jsonl", masked, params=target_params.model_dump(), seed=cfg.seed, l=cfg.l)
    write_dataset(out_dir / "target.truth.jsonl", truth, params=target_params.model_dump(), seed=cfg.seed)
    write_json(out_dir / "synth.json", {
        "seed": cfg.seed,
        "n_source": cfg.n_source,
        "n_target": cfg.n_target,
        "l": cfg.l,
        "shift": {"rotation_degrees": cfg.rotation, "translation": cfg.translation},
        "source_params": source_params.model_dump(),
        "target_params": target_params.model_dump(),
    })
    logger.info(f"wrote synthetic datasets to {out_dir} (seed={cfg.seed})")
    return EXIT_OK


def cmd_train_source(cfg: TrainSourceConfig) -> int:
    _require_file(cfg.input, "dataset")
    _require_parent(cfg.out)
    _require_parent(_report_path(cfg))

    dataset, _ = read_dataset(cfg.input)
    model, report = train_source(dataset, _train_config(cfg))
    write_model(cfg.out, model)
    write_json(_report_path(cfg), report)
    return _exit_for(report)


def cmd_adapt(cfg: AdaptConfig) -> int:
    _require_file(cfg.source_model, "source model")
    _require_file(cfg.input, "dataset")
    _require_parent(cfg.out)
    _require_parent(_report_path(cfg))

    source = read_model(cfg.source_model)
    if not isinstance(source, LinearScorer):
        raise DataError(f"{cfg.source_model} must be a linear (source) model")
    dataset, _ = read_dataset(cfg.input)
    _check_dims(dataset, source.map.d, source.map.K, cfg.input)

    model, report = adapt(source, dataset, _train_config(cfg))
    write_model(cfg.out, model)
    write_json(_report_path(cfg), report)
    return _exit_for(report)


def _load_for_decoding(model_path: str, data_path: str):
    _require_file(model_path, "model")
    _require_file(data_path, "dataset")
    model = read_model(model_path)
    dataset, _ = read_dataset(data_path)
    _check_dims(dataset, model.map.d, model.map.K, data_path)
    weights = scorer_weights(model)
    predictions = [decode(weights, model.map, s.x) for s in dataset]
    return dataset, predictions


def cmd_predict(cfg: PredictConfig) -> int:
    _require_parent(cfg.out)
    _, predictions = _load_for_decoding(cfg.model, cfg.input)
    write_predictions(cfg.out, predictions)
    return EXIT_OK


def cmd_eval(cfg: EvalConfig) -> int:
    """{"mean_hamming", "n", "per_sample"} 기록"""
    _require_parent(cfg.out)
    if cfg.truth is not None:
        _require_file(cfg.truth, "truth file")
    dataset, predictions = _load_for_decoding(cfg.model, cfg.input)

    indices = [i for i, s in enumerate(dataset) if not (cfg.unlabeled_only and s.labeled)]
    if cfg.truth is not None:
        truth = read_labels(cfg.truth)
        if len(truth) != len(dataset):
            raise DataError(f"{cfg.truth} has {len(truth)} label sequences, dataset has {len(dataset)}")
    else:
        if any(not dataset.samples[i].labeled for i in indices):
            raise DataError("evaluation needs true labels: dataset has unlabeled samples and no --truth given")
        truth = [s.y for s in dataset]

    per_sample = [hamming_loss(truth[i], predictions[i]) for i in indices]
    metrics = EvalMetrics(
        mean_hamming=float(np.mean(per_sample)) if per_sample else 0.0,
        n=len(per_sample),
        per_sample=per_sample,
    )
    write_json(cfg.out, metrics)
    logger.info(f"mean_hamming={metrics.mean_hamming:.4f} over n={metrics.n}")
    return EXIT_OK


# === Argument Parsing ===

# flag dest -> config key
_KEY_MAP = {"c": "C", "max_iters": "max_cp_iters", "input": "in"}


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--c", type=float, help=f"regularization constant (default {settings.DEFAULT_C:g})")
    p.add_argument("--eps-cp", type=float, help="cutting-plane termination threshold")
    p.add_argument("--eps-qp", type=float, help="inner QP KKT tolerance")
    p.add_argument("--max-iters", type=int, help="cutting-plane iteration cap")
    p.add_argument("--in", dest="input", help="input dataset (JSONL)")
    p.add_argument("--out", help="output model JSON")
    p.add_argument("--report", help="report JSON (default: <out>.report.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stol", description="Domain-transfer structured output learning")
    parser.add_argument("--log", help="log level (overrides STOL_LOG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate source/target synthetic datasets")
    p.add_argument("--config", help="JSON file with run settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-source", type=int)
    p.add_argument("--n-target", type=int)
    p.add_argument("--l", type=int, help="labeled target samples")
    p.add_argument("--rotation", type=float, help="target rotation in degrees")
    p.add_argument("--translation", type=float, nargs="+", help="target translation vector")
    p.add_argument("--sigma", type=float, help="emission noise sd")
    p.add_argument("--out", help="output directory (must exist)")

    p = sub.add_parser("train-source", help="train the source model")
    p.add_argument("--config", help="JSON file with run settings")
    _add_train_flags(p)

    p = sub.add_parser("adapt", help="learn the delta function on the target domain")
    p.add_argument("--config", help="JSON file with run settings")
    p.add_argument("--source-model", help="source model JSON (kind=linear)")
    _add_train_flags(p)

    for name, help_text in (("predict", "write predicted label sequences"),
                            ("eval", "write mean normalized Hamming error")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with run settings")
        p.add_argument("--model", help="model JSON")
        p.add_argument("--in", dest="input", help="input dataset (JSONL)")
        p.add_argument("--out", help="output file")
        if name == "eval":
            p.add_argument("--truth", help="truth dataset or predictions JSONL")
            p.add_argument("--unlabeled-only", action="store_true", default=None,
                           help="score only samples whose labels are null in --in")
    return parser


COMMANDS: Dict[str, tuple] = {
    "synth": (SynthConfig, cmd_synth),
    "train-source": (TrainSourceConfig, cmd_train_source),
    "adapt": (AdaptConfig, cmd_adapt),
    "predict": (PredictConfig, cmd_predict),
    "eval": (EvalConfig, cmd_eval),
}


def resolve_config(model_cls: Type[BaseModel], args: argparse.Namespace) -> BaseModel:
    """--config 파일 값 위에 flag 값을 덮어써 엄격하게 검증"""
    values: Dict[str, Any] = {}
    if args.config:
        _require_file(args.config, "config file")
        try:
            with open(args.config, "r", encoding="utf-8") as f:
                values = json.load(f)
        except json.JSONDecodeError as e:
            raise DataError(f"{args.config}:{e.lineno}: invalid JSON ({e.msg})") from e
        if not isinstance(values, dict):
            raise DataError(f"{args.config}: expected a JSON object")

    for dest, value in vars(args).items():
        if dest in ("command", "config", "log") or value is None:
            continue
        values[_KEY_MAP.get(dest, dest)] = value

    try:
        return model_cls(**values)
    except ValidationError as e:
        err = e.errors()[0]
        loc = ".".join(str(p) for p in err.get("loc", ())) or "config"
        raise DataError(f"invalid {args.command} settings: {loc}: {err.get('msg')}") from e


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log)

    config_cls, command = COMMANDS[args.command]
    try:
        cfg = resolve_config(config_cls, args)
        return command(cfg)
    except DataError as e:
        print(f"stol {args.command}: {e}", file=sys.stderr)
        return EXIT_DATA
    except SolverError as e:
        print(f"stol {args.command}: solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
