"""
STOL - Chain Model

샘플/데이터셋, linear-chain joint feature map Psi, linear/transfer scoring.

Feature layout (m = d*K + K*K):
  [0, d*K)        emission block, label-major (label k -> entries k*d .. k*d+d-1)
  [d*K, d*K+K*K)  transition block, row-major (prev p, next q) -> d*K + p*K + q
"""

from dataclasses import dataclass
from typing import Iterator, List, Literal, Optional, Sequence

import numpy as np

from .errors import DataError


@dataclass(frozen=True, eq=False)
class Sample:
    """시퀀스 레이블링 샘플 하나 (x: T x d, y: 길이 T 또는 None)"""
    x: np.ndarray
    y: Optional[np.ndarray] = None

    @classmethod
    def create(cls, x: Sequence[Sequence[float]], y: Optional[Sequence[int]] = None) -> "Sample":
        xa = np.array(x, dtype=np.float64)
        if xa.ndim != 2 or xa.shape[0] < 1 or xa.shape[1] < 1:
            raise DataError(f"x must be a non-empty T x d array, got shape {xa.shape}")
        if not np.all(np.isfinite(xa)):
            raise DataError("x contains non-finite values")
        ya = None
        if y is not None:
            ya = np.array(y, dtype=np.int64)
            if ya.ndim != 1 or len(ya) != len(xa):
                raise DataError(f"y has length {len(ya)}, expected T = {len(xa)}")
        xa.setflags(write=False)
        if ya is not None:
            ya.setflags(write=False)
        return cls(xa, ya)

    @property
    def length(self) -> int:
        return self.x.shape[0]

    @property
    def labeled(self) -> bool:
        return self.y is not None

    def with_labels(self, y: Optional[Sequence[int]]) -> "Sample":
        return Sample.create(self.x, y)


@dataclass
class Dataset:
    """샘플 집합 (labeled 샘플이 앞에 오는 것이 기록 규칙)"""
    samples: List[Sample]
    d: int
    K: int
    domain_tag: Literal["source", "target"] = "source"

    def __post_init__(self):
        if self.d < 1 or self.K < 1:
            raise DataError(f"invalid dimensions d={self.d}, K={self.K}")
        for i, s in enumerate(self.samples):
            if s.x.shape[1] != self.d:
                raise DataError(f"sample {i}: x_t has {s.x.shape[1]} components, expected d = {self.d}")
            if s.y is not None and (s.y.min() < 0 or s.y.max() >= self.K):
                raise DataError(f"sample {i}: label out of range [0, {self.K})")

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    @property
    def labeled_count(self) -> int:
        return sum(1 for s in self.samples if s.labeled)

    def labeled_samples(self) -> List[Sample]:
        return [s for s in self.samples if s.labeled]

    def unlabeled_samples(self) -> List[Sample]:
        return [s for s in self.samples if not s.labeled]

    def labeled_first(self) -> bool:
        """labeled 샘플이 모두 unlabeled 샘플보다 앞에 있는지"""
        seen_unlabeled = False
        for s in self.samples:
            if not s.labeled:
                seen_unlabeled = True
            elif seen_unlabeled:
                return False
        return True


@dataclass(frozen=True)
class ChainFeatureMap:
    """linear-chain joint feature map Psi(x, y)"""
    d: int
    K: int

    def __post_init__(self):
        if self.d < 1 or self.K < 1:
            raise DataError(f"invalid dimensions d={self.d}, K={self.K}")

    @property
    def m(self) -> int:
        return self.d * self.K + self.K * self.K

    @property
    def emission_size(self) -> int:
        return self.d * self.K

    def split(self, weights: np.ndarray):
        """가중치를 (K x d emission, K x K transition) 행렬로 분해"""
        weights = self.check_weights(weights)
        emission = weights[: self.emission_size].reshape(self.K, self.d)
        transition = weights[self.emission_size:].reshape(self.K, self.K)
        return emission, transition

    def check_weights(self, weights) -> np.ndarray:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (self.m,):
            raise DataError(f"weights have shape {weights.shape}, expected ({self.m},)")
        return weights

    def check_input(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1:
            raise DataError(f"x must be a non-empty T x d array, got shape {x.shape}")
        if x.shape[1] != self.d:
            raise DataError(f"x_t has {x.shape[1]} components, expected d = {self.d}")
        return x

    def check_labels(self, y, length: int) -> np.ndarray:
        y = np.asarray(y, dtype=np.int64)
        if y.shape != (length,):
            raise DataError(f"y has shape {y.shape}, expected ({length},)")
        if length and (y.min() < 0 or y.max() >= self.K):
            raise DataError(f"label out of range [0, {self.K})")
        return y


@dataclass(frozen=True, eq=False)
class LinearScorer:
    """source 스코어 함수 f^S(x, y) = theta . Psi(x, y)"""
    theta: np.ndarray
    map: ChainFeatureMap

    def __post_init__(self):
        theta = self.map.check_weights(self.theta).copy()
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def zeros(cls, feature_map: ChainFeatureMap) -> "LinearScorer":
        return cls(np.zeros(feature_map.m), feature_map)


@dataclass(frozen=True, eq=False)
class TransferScorer:
    """target 스코어 함수 f^T = f^S + w . Psi (source는 고정)"""
    source: LinearScorer
    w: Optional[np.ndarray] = None

    def __post_init__(self):
        w = np.zeros(self.source.map.m) if self.w is None else self.source.map.check_weights(self.w).copy()
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def map(self) -> ChainFeatureMap:
        return self.source.map

    @property
    def combined(self) -> np.ndarray:
        """f^T와 동일한 단일 선형 가중치 theta + w"""
        return self.source.theta + self.w


def joint_features(feature_map: ChainFeatureMap, x, y) -> np.ndarray:
    """Psi(x, y): emission 합 + 인접 전이 카운트"""
    x = feature_map.check_input(x)
    T = x.shape[0]
    y = feature_map.check_labels(y, T)
    d, K = feature_map.d, feature_map.K

    emission = np.zeros((K, d))
    np.add.at(emission, y, x)
    transition = np.zeros((K, K))
    if T > 1:
        np.add.at(transition, (y[:-1], y[1:]), 1.0)
    return np.concatenate([emission.ravel(), transition.ravel()])


def score(scorer: LinearScorer, x, y) -> float:
    return float(scorer.theta @ joint_features(scorer.map, x, y))


def transfer_score(ts: TransferScorer, x, y) -> float:
    """f^T(x, y) = f^S(x, y) + w . Psi(x, y)"""
    psi = joint_features(ts.map, x, y)
    return float(ts.source.theta @ psi) + float(ts.w @ psi)


def scorer_weights(scorer) -> np.ndarray:
    """decode에 쓰는 단일 가중치 (linear: theta, transfer: theta + w)"""
    if isinstance(scorer, TransferScorer):
        return scorer.combined
    return scorer.theta
