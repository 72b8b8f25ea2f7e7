"""
STOL - Cutting-plane Trainer

frozen source f^S 위에 delta 함수 w . Psi 를 1-slack margin rescaling으로 학습.
source 학습은 f^S = 0 인 특수 경우로 같은 경로를 사용한다.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .chain_model import ChainFeatureMap, Dataset, LinearScorer, Sample, TransferScorer, joint_features, score
from .errors import DataError
from .inference import decode, hamming_loss, loss_augmented_decode
from .models import TrainConfig, TrainReport
from .qp import ConstraintRecord, WorkingSet, dual_objective, primal_slack, recover_w, solve_dual

logger = logging.getLogger("stol.trainer")


def objective(w, xi: float, C: float) -> float:
    """1/2 ||w||^2 + C xi"""
    if xi < 0:
        raise DataError(f"slack must be nonnegative, got {xi}")
    w = np.asarray(w, dtype=np.float64)
    return 0.5 * float(w @ w) + C * xi


def build_constraint(labeled_target: Sequence[Sample], source: LinearScorer,
                     ybar: Sequence[Sequence[int]]) -> ConstraintRecord:
    """joint labeling ybar에 대한 평균 dpsi, Delta, s 계산"""
    l = len(labeled_target)
    if l < 1 or len(ybar) != l:
        raise DataError(f"need one competing labeling per labeled sample (l = {l}, got {len(ybar)})")

    feature_map = source.map
    dpsi = np.zeros(feature_map.m)
    delta_loss = 0.0
    source_margin = 0.0
    for sample, competitor in zip(labeled_target, ybar):
        if sample.y is None:
            raise DataError("constraints can only be built from labeled samples")
        if len(competitor) != len(sample.y):
            raise DataError(f"competing labeling has length {len(competitor)}, expected {len(sample.y)}")
        dpsi += joint_features(feature_map, sample.x, sample.y) - joint_features(feature_map, sample.x, competitor)
        delta_loss += hamming_loss(sample.y, competitor)
        source_margin += score(source, sample.x, sample.y) - score(source, sample.x, competitor)

    dpsi /= l
    dpsi.setflags(write=False)
    key = tuple(tuple(int(v) for v in competitor) for competitor in ybar)
    return ConstraintRecord(key, dpsi, delta_loss / l, source_margin / l)


def separate(ts: TransferScorer, labeled: Sequence[Sample]) -> List[np.ndarray]:
    """labeled 샘플마다 가장 위반하는 출력 (index 순서 유지)"""
    return [loss_augmented_decode(ts, s.x, s.y)[0] for s in labeled]


def decode_error(weights, feature_map: ChainFeatureMap, labeled: Sequence[Sample]) -> float:
    """decode 예측의 평균 정규화 Hamming 오차"""
    if not labeled:
        return 0.0
    return float(np.mean([hamming_loss(s.y, decode(weights, feature_map, s.x)) for s in labeled]))


class CuttingPlaneTrainer:
    """한 번의 adapt 실행 상태 (실행 중 공유 불가)"""

    def __init__(self, source: LinearScorer, labeled: Sequence[Sample], cfg: TrainConfig):
        self.source = source
        self.labeled = list(labeled)
        self.cfg = cfg
        self.working_set = WorkingSet()
        self.w = np.zeros(source.map.m)
        self.xi = 0.0
        self.alpha = np.zeros(0)
        self.dual_trace: List[float] = []
        self.gap_trace: List[float] = []

    def _resolve(self) -> None:
        H = self.working_set.gram()
        b = self.working_set.linear_term()
        warm = np.concatenate([self.alpha, [0.0]])
        state = solve_dual(H, b, self.cfg.C, self.cfg.eps_qp, warm_start=warm)
        self.alpha = state.alpha
        self.w = recover_w(self.working_set, state.alpha)
        self.xi = primal_slack(self.working_set, self.w)

        dual = dual_objective(H, b, state.alpha)
        self.dual_trace.append(dual)
        self.gap_trace.append(objective(self.w, self.xi, self.cfg.C) - dual)

    def run(self) -> Tuple[TransferScorer, TrainReport]:
        terminated_by = "iteration_cap"
        iterations = 0
        for iterations in range(1, self.cfg.max_cp_iters + 1):
            ts = TransferScorer(self.source, self.w)
            record = build_constraint(self.labeled, self.source, separate(ts, self.labeled))
            violation = record.violation(self.w) - self.xi
            logger.debug(f"iter {iterations}: |W|={len(self.working_set)}, xi={self.xi:.6g}, "
                         f"violation={violation:.6g}")
            if violation <= self.cfg.eps_cp:
                terminated_by = "converged"
                break
            self.working_set.add(record)
            self._resolve()

        ts = TransferScorer(self.source, self.w)
        report = TrainReport(
            iterations=iterations,
            dual_objective_trace=self.dual_trace,
            duality_gap_trace=self.gap_trace,
            final_primal_objective=objective(self.w, self.xi, self.cfg.C),
            final_dual_objective=self.dual_trace[-1] if self.dual_trace else 0.0,
            final_xi=self.xi,
            train_loss=decode_error(ts.combined, ts.map, self.labeled),
            terminated_by=terminated_by,
            working_set_size=len(self.working_set),
            labeled_count=len(self.labeled),
            config=self.cfg,
        )
        log = logger.info if terminated_by == "converged" else logger.warning
        log(f"{terminated_by} after {iterations} iterations: |W|={report.working_set_size}, "
            f"objective={report.final_primal_objective:.6g}, xi={self.xi:.6g}, "
            f"train_loss={report.train_loss:.4f}")
        return ts, report


def adapt(source: LinearScorer, target: Dataset, cfg: Optional[TrainConfig] = None) -> Tuple[TransferScorer, TrainReport]:
    """frozen source 위에 delta 가중치 w 학습 (labeled target 샘플 1..l 사용)"""
    cfg = cfg or TrainConfig()
    if (target.d, target.K) != (source.map.d, source.map.K):
        raise DataError(f"dataset has d={target.d}, K={target.K} but the source model has "
                        f"d={source.map.d}, K={source.map.K}")
    labeled = target.labeled_samples()
    if not labeled:
        raise DataError("adaptation needs at least one labeled target sample (l >= 1)")
    logger.info(f"adapting on l={len(labeled)} labeled of n={len(target)} samples, C={cfg.C:g}, eps_cp={cfg.eps_cp:g}")
    return CuttingPlaneTrainer(source, labeled, cfg).run()


def train_source(source_data: Dataset, cfg: Optional[TrainConfig] = None) -> Tuple[LinearScorer, TrainReport]:
    """zero base 위의 adapt = 1-slack structural SVM"""
    unlabeled = len(source_data) - source_data.labeled_count
    if unlabeled:
        raise DataError(f"source training needs every sample labeled ({unlabeled} unlabeled)")
    if not len(source_data):
        raise DataError("source dataset is empty")
    feature_map = ChainFeatureMap(source_data.d, source_data.K)
    ts, report = adapt(LinearScorer.zeros(feature_map), source_data, cfg)
    return LinearScorer(ts.w, feature_map), report
