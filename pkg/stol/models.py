"""
STOL - Pydantic Models

파일 포맷(데이터셋/모델/리포트)과 실행 설정 스키마.
수치 계산용 타입은 chain_model / qp 모듈의 dataclass를 사용한다.
"""

import math
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings


class StrictModel(BaseModel):
    """알 수 없는 키를 거부하는 기본 모델"""
    model_config = ConfigDict(extra="forbid")


# === File Formats ===

class SampleRecord(StrictModel):
    """데이터셋 JSONL의 샘플 한 줄"""
    x: List[List[float]] = Field(..., description="T개의 입력 벡터 (각 d차원)")
    y: Optional[List[int]] = Field(None, description="레이블 시퀀스 (없으면 null)")


class DatasetHeader(BaseModel):
    """데이터셋 JSONL 첫 줄 헤더 (provenance 키 허용)"""
    model_config = ConfigDict(extra="allow")

    d: int = Field(..., ge=1, description="입력 차원")
    K: int = Field(..., ge=1, description="레이블 수")
    domain: Literal["source", "target"] = Field(..., description="도메인 태그")


class PredictionRecord(StrictModel):
    """예측 JSONL 한 줄"""
    y: List[int]


class ModelRecord(StrictModel):
    """모델 JSON (linear | transfer)"""
    kind: Literal["linear", "transfer"]
    d: int = Field(..., ge=1)
    K: int = Field(..., ge=1)
    theta: List[float] = Field(..., description="source 가중치 (길이 m)")
    w: Optional[List[float]] = Field(None, description="delta 가중치 (transfer 전용)")

    @model_validator(mode="after")
    def _check_shapes(self) -> "ModelRecord":
        m = self.d * self.K + self.K * self.K
        if len(self.theta) != m:
            raise ValueError(f"theta has length {len(self.theta)}, expected m = {m}")
        if self.kind == "transfer":
            if self.w is None or len(self.w) != m:
                raise ValueError(f"transfer model needs w of length m = {m}")
        elif self.w is not None:
            raise ValueError("linear model must not carry w")
        if not all(math.isfinite(v) for v in self.theta + (self.w or [])):
            raise ValueError("weights must be finite")
        return self


# === Training ===

class TrainConfig(StrictModel):
    """cutting-plane 학습 설정"""
    C: float = Field(default_factory=lambda: settings.DEFAULT_C, gt=0, description="정규화 상수")
    eps_cp: float = Field(default_factory=lambda: settings.DEFAULT_EPS_CP, gt=0,
                          description="cutting-plane 종료 임계값")
    eps_qp: float = Field(default_factory=lambda: settings.DEFAULT_EPS_QP, gt=0,
                          description="내부 QP KKT 허용 오차")
    max_cp_iters: int = Field(default_factory=lambda: settings.DEFAULT_MAX_CP_ITERS, ge=1,
                              description="최대 cutting-plane 반복 수")

    @model_validator(mode="after")
    def _check_tolerances(self) -> "TrainConfig":
        if not self.eps_cp > self.eps_qp:
            raise ValueError("eps_cp must be greater than eps_qp")
        return self


class TrainReport(StrictModel):
    """학습 리포트 (모델 파일과 함께 저장)"""
    iterations: int = Field(..., description="separation pass 수")
    dual_objective_trace: List[float] = Field(default_factory=list)
    duality_gap_trace: List[float] = Field(default_factory=list,
                                           description="QP solve마다 primal - dual")
    final_primal_objective: float
    final_dual_objective: float
    final_xi: float
    train_loss: float = Field(..., description="labeled 샘플 decode의 평균 Hamming 오차")
    terminated_by: Literal["converged", "iteration_cap"]
    working_set_size: int
    labeled_count: int
    dual_linear_term: str = Field(
        "corrected: b_k = delta_loss_k - source_margin_k "
        "(averaged loss minus averaged source score difference)",
        description="사용한 dual 선형항 형태",
    )
    initialization: str = Field(
        "empty working set; separation runs first (no random seed constraint)",
    )
    config: TrainConfig


# === Synthetic Data ===

class DomainParams(StrictModel):
    """합성 도메인 파라미터 (Markov chain label + Gaussian emission)"""
    d: int = Field(..., ge=1)
    K: int = Field(..., ge=1)
    label_prior: List[float] = Field(..., description="초기 레이블 분포 (simplex)")
    transition: List[List[float]] = Field(..., description="K x K row-stochastic 행렬")
    means: List[List[float]] = Field(..., description="레이블별 emission 평균 (K x d)")
    noise_sigma: float = Field(..., gt=0)
    emission_matrix: List[List[float]] = Field(..., description="affine 변환 행렬 R (d x d)")
    emission_offset: List[float] = Field(..., description="affine 변환 offset b (d)")
    length_range: List[int] = Field(..., min_length=2, max_length=2, description="[T_min, T_max]")

    @model_validator(mode="after")
    def _check_consistency(self) -> "DomainParams":
        d, K = self.d, self.K
        if len(self.label_prior) != K or any(p < 0 for p in self.label_prior):
            raise ValueError("label_prior must be a nonnegative K-vector")
        if abs(sum(self.label_prior) - 1.0) > 1e-12:
            raise ValueError("label_prior must sum to 1")
        if len(self.transition) != K:
            raise ValueError("transition must have K rows")
        for row in self.transition:
            if len(row) != K or any(p < 0 for p in row):
                raise ValueError("transition rows must be nonnegative K-vectors")
            if abs(sum(row) - 1.0) > 1e-12:
                raise ValueError("transition rows must sum to 1")
        if len(self.means) != K or any(len(mu) != d for mu in self.means):
            raise ValueError("means must be K vectors of dimension d")
        if len(self.emission_matrix) != d or any(len(r) != d for r in self.emission_matrix):
            raise ValueError("emission_matrix must be d x d")
        if len(self.emission_offset) != d:
            raise ValueError("emission_offset must have d entries")
        t_min, t_max = self.length_range
        if t_min < 1 or t_max < t_min:
            raise ValueError("length_range must satisfy 1 <= T_min <= T_max")
        return self


# === CLI Run Configs ===

class SynthConfig(StrictModel):
    seed: int = 0
    n_source: int = Field(200, ge=1)
    n_target: int = Field(240, ge=1)
    l: int = Field(10, ge=0)
    rotation: float = Field(60.0, description="target 회전 (도)")
    translation: List[float] = Field(default_factory=lambda: [0.5, -0.25])
    sigma: Optional[float] = Field(None, gt=0, description="noise_sigma override")
    out: str

    @field_validator("l")
    @classmethod
    def _l_le_target(cls, v: int, info) -> int:
        n_target = info.data.get("n_target")
        if n_target is not None and v > n_target:
            raise ValueError(f"l = {v} exceeds n_target = {n_target}")
        return v


class TrainSourceConfig(TrainConfig):
    input: str = Field(..., alias="in")
    out: str
    report: Optional[str] = None

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class AdaptConfig(TrainSourceConfig):
    source_model: str


class PredictConfig(StrictModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    model: str
    input: str = Field(..., alias="in")
    out: str


class EvalConfig(PredictConfig):
    truth: Optional[str] = None
    unlabeled_only: bool = False


class EvalMetrics(StrictModel):
    """평가 결과"""
    mean_hamming: float
    n: int
    per_sample: List[float]
