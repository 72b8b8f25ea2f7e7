"""
STOL - Inference

Viterbi decoding, loss-augmented separation, normalized Hamming loss,
brute-force enumeration oracle.

Tie-break: 마지막 위치부터 backtrack하면서 항상 가장 작은 레이블을 고른다.
brute_force_argmax도 같은 규칙(뒤집은 시퀀스의 사전순 최소)을 따른다.
"""

import itertools
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from .chain_model import ChainFeatureMap, TransferScorer
from .config import settings
from .errors import DataError

logger = logging.getLogger("stol.inference")


def hamming_loss(y: Sequence[int], ybar: Sequence[int]) -> float:
    """정규화 Hamming loss: 불일치 위치 수 / T"""
    y = np.asarray(y)
    ybar = np.asarray(ybar)
    if y.ndim != 1 or y.shape != ybar.shape or len(y) < 1:
        raise DataError(f"label sequences must be non-empty and equal length, got {y.shape} vs {ybar.shape}")
    return float(np.count_nonzero(y != ybar)) / len(y)


def _potentials(feature_map: ChainFeatureMap, weights, x, y_true=None) -> Tuple[np.ndarray, np.ndarray]:
    """위치별 emission potential (T x K)과 transition 행렬 (K x K)"""
    x = feature_map.check_input(x)
    emission, transition = feature_map.split(weights)
    potentials = x @ emission.T
    if y_true is not None:
        T = x.shape[0]
        y_true = feature_map.check_labels(y_true, T)
        # y_true_t 가 아닌 레이블마다 1/T 가산
        augment = np.full((T, feature_map.K), 1.0 / T)
        augment[np.arange(T), y_true] = 0.0
        potentials = potentials + augment
    return potentials, transition


def path_score(potentials: np.ndarray, transition: np.ndarray, labels: Sequence[int]) -> float:
    """Viterbi와 같은 덧셈 순서로 경로 점수 누적"""
    total = potentials[0, labels[0]]
    for t in range(1, len(labels)):
        total = total + transition[labels[t - 1], labels[t]] + potentials[t, labels[t]]
    return float(total)


def viterbi(potentials: np.ndarray, transition: np.ndarray) -> Tuple[np.ndarray, float]:
    """first-order DP, O(T K^2). (labels, best value) 반환"""
    T, K = potentials.shape
    if T < 1:
        raise DataError("cannot decode an empty sequence")

    delta = potentials[0].copy()
    backpointers = np.zeros((T, K), dtype=np.int64)
    for t in range(1, T):
        # candidates[p, q] = delta[p] + A[p, q]; argmax는 가장 작은 p 선택
        candidates = delta[:, None] + transition
        backpointers[t] = np.argmax(candidates, axis=0)
        delta = candidates[backpointers[t], np.arange(K)] + potentials[t]

    labels = np.zeros(T, dtype=np.int64)
    labels[-1] = int(np.argmax(delta))
    for t in range(T - 1, 0, -1):
        labels[t - 1] = backpointers[t, labels[t]]
    return labels, float(delta[labels[-1]])


def decode(weights, feature_map: ChainFeatureMap, x) -> np.ndarray:
    """argmax_y weights . Psi(x, y)"""
    potentials, transition = _potentials(feature_map, weights, x)
    labels, _ = viterbi(potentials, transition)
    return labels


def loss_augmented_decode(ts: TransferScorer, x, y_true) -> Tuple[np.ndarray, float]:
    """
    separation oracle: argmax_y~ [ hamming_loss(y_true, y~) + f^T(x, y~) ]

    score를 더하는 형태 (margin rescaling 제약의 violation 최대화).
    """
    if y_true is None:
        raise DataError("loss-augmented decoding needs the true labels")
    potentials, transition = _potentials(ts.map, ts.combined, x, y_true)
    return viterbi(potentials, transition)


def brute_force_argmax(feature_map: ChainFeatureMap, weights, x,
                       y_true: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, float]:
    """전체 K^T 시퀀스 열거 (테스트 오라클)"""
    x = feature_map.check_input(x)
    T, K = x.shape[0], feature_map.K
    if K ** T > settings.BRUTE_FORCE_LIMIT:
        raise DataError(f"K^T = {K}^{T} exceeds the enumeration limit {settings.BRUTE_FORCE_LIMIT}")

    potentials, transition = _potentials(feature_map, weights, x, y_true)
    best, best_value = None, -np.inf
    for labels in itertools.product(range(K), repeat=T):
        value = path_score(potentials, transition, labels)
        if value > best_value or (value == best_value and labels[::-1] < best[::-1]):
            best, best_value = labels, value
    return np.array(best, dtype=np.int64), best_value
