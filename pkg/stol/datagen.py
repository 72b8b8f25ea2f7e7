"""
STOL - Synthetic Domain Generator

Markov chain label + Gaussian emission 시퀀스 생성, affine covariate shift,
seeded label masking. 기본값은 data/domain_defaults.json 에서 로드한다.
"""

import json
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from .chain_model import Dataset, Sample
from .config import settings
from .errors import DataError
from .models import DomainParams

logger = logging.getLogger("stol.datagen")

# 기본값 (JSON 로드 실패 시 폴백)
DEFAULT_D = 2
DEFAULT_K = 3
DEFAULT_SIGMA = 0.3
DEFAULT_SELF_TRANSITION = 0.7
DEFAULT_LENGTH_RANGE = [4, 8]
DEFAULT_ROTATION = 60.0
DEFAULT_TRANSLATION = [0.5, -0.25]


def load_domain_defaults(path: Optional[str] = None) -> dict:
    """domain_defaults.json 로드 (없거나 깨졌으면 빈 dict)"""
    file_path = Path(path or settings.DOMAIN_DEFAULTS_FILE)
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        logger.warning(f"{file_path} not found, using built-in defaults")
        return {}
    except json.JSONDecodeError as e:
        logger.warning(f"{file_path} parse error: {e}, using built-in defaults")
        return {}


def default_params(sigma: Optional[float] = None, path: Optional[str] = None) -> DomainParams:
    """기본 source 도메인: 단위원 위 K개 평균, self-transition 0.7, identity 변환"""
    rules = load_domain_defaults(path)
    d = rules.get("d", DEFAULT_D)
    K = rules.get("K", DEFAULT_K)
    self_p = rules.get("self_transition", DEFAULT_SELF_TRANSITION)

    if K == 1:
        transition = [[1.0]]
    else:
        off = (1.0 - self_p) / (K - 1)
        transition = [[self_p if p == q else off for q in range(K)] for p in range(K)]
    means = rules.get("means")
    if means is None:
        means = []
        for k in range(K):
            angle = 2.0 * math.pi * k / K
            means.append([math.cos(angle), math.sin(angle)] + [0.0] * (d - 2))
    try:
        return DomainParams(
            d=d,
            K=K,
            label_prior=[1.0 / K] * K,
            transition=transition,
            means=means,
            noise_sigma=sigma if sigma is not None else rules.get("noise_sigma", DEFAULT_SIGMA),
            emission_matrix=np.eye(d).tolist(),
            emission_offset=[0.0] * d,
            length_range=rules.get("length_range", DEFAULT_LENGTH_RANGE),
        )
    except ValidationError as e:
        raise DataError(f"invalid domain defaults: {e}") from e


def _normalized(values: List[float]) -> List[float]:
    arr = np.asarray(values, dtype=np.float64)
    return (arr / arr.sum()).tolist()


def generate(params: DomainParams, n: int, seed: int, domain: str = "source") -> Dataset:
    """
    seed로 완전히 결정되는 데이터셋 생성

    샘플 i는 SeedSequence(seed).spawn(n)[i]에서 두 스트림을 받는다:
    label 스트림 (T, y)과 noise 스트림 (epsilon). sigma를 바꿔도 레이블/길이는 동일.
    """
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    d, K = params.d, params.K
    prior = np.asarray(_normalized(params.label_prior))
    transition = np.array([_normalized(row) for row in params.transition])
    means = np.asarray(params.means, dtype=np.float64)
    R = np.asarray(params.emission_matrix, dtype=np.float64)
    offset = np.asarray(params.emission_offset, dtype=np.float64)
    t_min, t_max = params.length_range

    samples = []
    for child in np.random.SeedSequence(seed).spawn(n):
        label_stream, noise_stream = child.spawn(2)
        label_rng = np.random.default_rng(label_stream)
        noise_rng = np.random.default_rng(noise_stream)

        T = int(label_rng.integers(t_min, t_max + 1))
        y = np.zeros(T, dtype=np.int64)
        y[0] = label_rng.choice(K, p=prior)
        for t in range(1, T):
            y[t] = label_rng.choice(K, p=transition[y[t - 1]])

        noise = noise_rng.normal(0.0, params.noise_sigma, size=(T, d))
        x = (means[y] + noise) @ R.T + offset
        samples.append(Sample.create(x, y))
    return Dataset(samples, d, K, domain)


def rotation_matrix(degrees: float) -> np.ndarray:
    theta = math.radians(degrees)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def shift(params: DomainParams, rotation_degrees: float,
          translation: Sequence[float],
          matrix: Optional[Sequence[Sequence[float]]] = None) -> DomainParams:
    """
    emission 변환 뒤에 x -> Q x + t 를 합성 (label 과정은 그대로)

    d = 2 이면 rotation_degrees로 Q를 만들고, 그 외에는 직교 행렬 matrix를 받는다.
    """
    d = params.d
    translation = np.asarray(translation, dtype=np.float64)
    if translation.shape != (d,):
        raise DataError(f"translation must have {d} entries")
    if matrix is not None:
        Q = np.asarray(matrix, dtype=np.float64)
        if Q.shape != (d, d):
            raise DataError(f"shift matrix must be {d} x {d}")
        if not np.allclose(Q @ Q.T, np.eye(d), rtol=0.0, atol=1e-8):
            raise DataError("shift matrix must be orthogonal")
    elif d == 2:
        Q = rotation_matrix(rotation_degrees)
    elif rotation_degrees == 0:
        Q = np.eye(d)
    else:
        raise DataError("rotation by angle needs d = 2; pass an orthogonal matrix instead")

    R = np.asarray(params.emission_matrix, dtype=np.float64)
    b = np.asarray(params.emission_offset, dtype=np.float64)
    if np.array_equal(Q, np.eye(d)) and not translation.any():
        return params.model_copy(deep=True)
    return params.model_copy(update={
        "emission_matrix": (Q @ R).tolist(),
        "emission_offset": (Q @ b + translation).tolist(),
    })


def default_shift(params: DomainParams, path: Optional[str] = None) -> DomainParams:
    """domain_defaults.json 의 shift (기본 60도 회전, [0.5, -0.25] 이동)"""
    rules = load_domain_defaults(path).get("shift", {})
    return shift(params,
                 rules.get("rotation_degrees", DEFAULT_ROTATION),
                 rules.get("translation", DEFAULT_TRANSLATION))


def mask_labels(ds: Dataset, l: int, seed: int) -> Tuple[Dataset, Dataset]:
    """
    seed로 고른 l개 샘플만 레이블 유지 (labeled 먼저, 원래 순서 유지)

    Returns:
        (masked dataset, truth sidecar) - sidecar는 같은 순서로 모든 레이블 보유
    """
    n = len(ds)
    if not 0 <= l <= n:
        raise DataError(f"l must be within [0, n = {n}], got {l}")
    if any(not s.labeled for s in ds):
        raise DataError("mask_labels needs a fully labeled dataset")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    keep = set(int(i) for i in rng.choice(n, size=l, replace=False))
    order = sorted(keep) + [i for i in range(n) if i not in keep]

    truth = [ds.samples[i] for i in order]
    masked = [s if i in keep else s.with_labels(None) for i, s in zip(order, truth)]
    logger.info(f"masked {n - l} of {n} samples (l={l}, seed={seed})")
    return (Dataset(masked, ds.d, ds.K, ds.domain_tag),
            Dataset(truth, ds.d, ds.K, ds.domain_tag))
