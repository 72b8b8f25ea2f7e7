"""
STOL - Transfer Experiment

seed마다 source / target(l labeled + test) 데이터를 만들고
source-only, target-only, adapted, pooled 모델의 target test 오차를 비교한다.
"""

import logging
from dataclasses import asdict, dataclass, field
from statistics import median
from typing import Dict, List, Optional, Sequence

import numpy as np

from .chain_model import Dataset, scorer_weights
from .datagen import default_params, default_shift, generate, mask_labels
from .models import TrainConfig, TrainReport
from .trainer import adapt, decode_error, train_source

logger = logging.getLogger("stol.experiment")

METHODS = ("source_only", "target_only", "adapted", "pooled")


@dataclass
class RunSummary:
    """학습 한 번의 수렴 기록 (TrainReport 요약)"""
    iterations: int
    converged: bool
    C: float
    min_gap: float
    max_gap: float
    max_dual_drop: float
    final_xi: float
    train_loss: float
    weight_norm: float  # train_source: ||theta||, adapt: ||w||

    @classmethod
    def from_report(cls, report: TrainReport, weights) -> "RunSummary":
        gaps = report.duality_gap_trace or [0.0]
        drops = -np.diff(report.dual_objective_trace) if len(report.dual_objective_trace) > 1 else [0.0]
        return cls(
            iterations=report.iterations,
            converged=report.terminated_by == "converged",
            C=report.config.C,
            min_gap=float(min(gaps)),
            max_gap=float(max(gaps)),
            max_dual_drop=max(0.0, float(np.max(drops))),
            final_xi=report.final_xi,
            train_loss=report.train_loss,
            weight_norm=float(np.linalg.norm(weights)),
        )


@dataclass
class TrialResult:
    """seed 하나의 결과"""
    seed: int
    errors: Dict[str, float]
    runs: Dict[str, RunSummary] = field(default_factory=dict)


def run_trial(seed: int, n_source: int = 200, l: int = 10, n_test: int = 200,
              cfg: Optional[TrainConfig] = None) -> TrialResult:
    """seed 하나에 대해 네 가지 모델 학습 및 target test 평가"""
    cfg = cfg or TrainConfig()
    source_params = default_params()
    target_params = default_shift(source_params)
    s_source, s_target, s_mask = (int(s) for s in np.random.SeedSequence(seed).generate_state(3))

    source = generate(source_params, n_source, s_source, "source")
    target = generate(target_params, l + n_test, s_target, "target")
    masked, truth = mask_labels(target, l, s_mask)
    labeled = masked.labeled_samples()
    test = truth.samples[l:]

    source_model, source_report = train_source(source, cfg)
    target_model, target_report = train_source(Dataset(labeled, source.d, source.K, "target"), cfg)
    adapted, adapt_report = adapt(source_model, masked, cfg)
    pooled_model, pooled_report = train_source(
        Dataset(source.samples + labeled, source.d, source.K, "source"), cfg)

    feature_map = source_model.map
    models = {
        "source_only": (source_model, source_report),
        "target_only": (target_model, target_report),
        "adapted": (adapted, adapt_report),
        "pooled": (pooled_model, pooled_report),
    }
    result = TrialResult(seed=seed, errors={})
    for name, (model, report) in models.items():
        result.errors[name] = decode_error(scorer_weights(model), feature_map, test)
        learned = model.w if name == "adapted" else model.theta
        result.runs[name] = RunSummary.from_report(report, learned)
    logger.info(f"seed {seed}: " + ", ".join(f"{k}={v:.4f}" for k, v in result.errors.items()))
    return result


def summarize(trials: List[TrialResult]) -> Dict[str, float]:
    """방법별 median target test 오차"""
    return {name: median(t.errors[name] for t in trials) for name in METHODS}


def run_experiment(seeds: Sequence[int], cfg: Optional[TrainConfig] = None, **kwargs) -> Dict:
    trials = [run_trial(seed, cfg=cfg, **kwargs) for seed in seeds]
    return {
        "medians": summarize(trials),
        "trials": [asdict(t) for t in trials],
    }
