"""
STOL - 공용 테스트 fixture
"""

import numpy as np
import pytest

from stol.chain_model import ChainFeatureMap, Dataset, LinearScorer, Sample
from stol.models import DomainParams

# l=2, K=2, T=2, d=1 (joint labeling 4^2 = 16개)
TINY_X = [[[1.0], [-0.5]], [[0.3], [0.8]]]
TINY_Y = [[0, 1], [1, 1]]
TINY_SOURCE_THETA = [0.4, -0.2, 0.1, -0.3, 0.2, 0.05]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tiny_target():
    samples = [Sample.create(x, y) for x, y in zip(TINY_X, TINY_Y)]
    return Dataset(samples, d=1, K=2, domain_tag="target")


@pytest.fixture
def tiny_map():
    return ChainFeatureMap(d=1, K=2)


@pytest.fixture(params=["zero", "nonzero"])
def tiny_source(request, tiny_map):
    if request.param == "zero":
        return LinearScorer.zeros(tiny_map)
    return LinearScorer(np.array(TINY_SOURCE_THETA), tiny_map)


@pytest.fixture
def binary_params():
    """d=2, K=2 균형 레이블 도메인"""
    return DomainParams(
        d=2,
        K=2,
        label_prior=[0.5, 0.5],
        transition=[[0.5, 0.5], [0.5, 0.5]],
        means=[[1.0, 0.0], [-1.0, 0.0]],
        noise_sigma=0.3,
        emission_matrix=[[1.0, 0.0], [0.0, 1.0]],
        emission_offset=[0.0, 0.0],
        length_range=[3, 6],
    )
