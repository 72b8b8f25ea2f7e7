"""
STOL - Data Loader

데이터셋 JSONL (첫 줄 헤더), 예측 JSONL, 모델/리포트 JSON 읽기/쓰기.
float는 repr 그대로 기록되므로 다시 읽은 가중치는 bit 단위로 동일하다.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from .chain_model import ChainFeatureMap, Dataset, LinearScorer, Sample, TransferScorer
from .errors import DataError, DataFormatError
from .models import DatasetHeader, ModelRecord, PredictionRecord, SampleRecord

logger = logging.getLogger("stol.data_loader")

Scorer = Union[LinearScorer, TransferScorer]


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(p) for p in err.get("loc", ())) or "record"
    return f"{loc}: {err.get('msg')}"


def _open_lines(path: Union[str, Path]) -> List[str]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()


def _parse_line(path, lineno: int, line: str) -> Dict[str, Any]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise DataFormatError(str(path), f"invalid JSON ({e.msg})", lineno) from e
    if not isinstance(obj, dict):
        raise DataFormatError(str(path), "expected a JSON object", lineno)
    return obj


def read_dataset(path: Union[str, Path]) -> Tuple[Dataset, Dict[str, Any]]:
    """데이터셋 JSONL 로드 -> (Dataset, 헤더 dict)"""
    lines = _open_lines(path)
    if not lines:
        raise DataFormatError(str(path), "empty dataset file")

    try:
        header = DatasetHeader(**_parse_line(path, 1, lines[0]))
    except ValidationError as e:
        raise DataFormatError(str(path), f"bad header ({_first_error(e)})", 1) from e

    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = SampleRecord(**_parse_line(path, lineno, line))
            sample = Sample.create(record.x, record.y)
            Dataset([sample], header.d, header.K)
        except ValidationError as e:
            raise DataFormatError(str(path), _first_error(e), lineno) from e
        except DataFormatError:
            raise
        except DataError as e:
            raise DataFormatError(str(path), str(e), lineno) from e
        samples.append(sample)

    dataset = Dataset(samples, header.d, header.K, header.domain)
    logger.info(f"loaded {len(dataset)} samples ({dataset.labeled_count} labeled) from {path}")
    return dataset, header.model_dump()


def _sample_line(sample: Sample) -> str:
    y = None if sample.y is None else sample.y.tolist()
    return json.dumps({"x": sample.x.tolist(), "y": y})


def write_dataset(path: Union[str, Path], dataset: Dataset, **provenance: Any) -> None:
    """헤더 + 샘플 JSONL 기록 (labeled 샘플이 앞에 와야 함)"""
    if not dataset.labeled_first():
        raise DataError("labeled samples must precede unlabeled ones")
    header = {"d": dataset.d, "K": dataset.K, "domain": dataset.domain_tag, **provenance}
    lines = [json.dumps(header)] + [_sample_line(s) for s in dataset]
    _write_text(path, "\n".join(lines) + "\n")


def read_labels(path: Union[str, Path]) -> List[np.ndarray]:
    """정답 레이블 시퀀스 로드 (truth 데이터셋 또는 예측 JSONL 모두 허용)"""
    lines = _open_lines(path)
    labels = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        obj = _parse_line(path, lineno, line)
        if lineno == 1 and "domain" in obj:
            continue
        if obj.get("y") is None:
            raise DataFormatError(str(path), "sample has no labels", lineno)
        try:
            labels.append(np.asarray(PredictionRecord(y=obj["y"]).y, dtype=np.int64))
        except ValidationError as e:
            raise DataFormatError(str(path), _first_error(e), lineno) from e
    return labels


def write_predictions(path: Union[str, Path], predictions: List[np.ndarray]) -> None:
    lines = [json.dumps({"y": [int(v) for v in y]}) for y in predictions]
    _write_text(path, "".join(line + "\n" for line in lines))


def read_model(path: Union[str, Path]) -> Scorer:
    """모델 JSON 로드 (kind에 따라 LinearScorer / TransferScorer)"""
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            record = ModelRecord(**json.load(f))
    except json.JSONDecodeError as e:
        raise DataFormatError(str(path), f"invalid JSON ({e.msg})", e.lineno) from e
    except ValidationError as e:
        raise DataFormatError(str(path), f"bad model ({_first_error(e)})") from e
    except TypeError as e:
        raise DataFormatError(str(path), "expected a JSON object") from e

    feature_map = ChainFeatureMap(record.d, record.K)
    source = LinearScorer(np.array(record.theta), feature_map)
    if record.kind == "linear":
        return source
    return TransferScorer(source, np.array(record.w))


def model_record(scorer: Scorer) -> ModelRecord:
    if isinstance(scorer, TransferScorer):
        return ModelRecord(kind="transfer", d=scorer.map.d, K=scorer.map.K,
                           theta=scorer.source.theta.tolist(), w=scorer.w.tolist())
    return ModelRecord(kind="linear", d=scorer.map.d, K=scorer.map.K, theta=scorer.theta.tolist())


def write_model(path: Union[str, Path], scorer: Scorer) -> None:
    write_json(path, model_record(scorer).model_dump(exclude_none=True))


def write_json(path: Union[str, Path], payload: Union[BaseModel, Dict[str, Any]]) -> None:
    """리포트/메트릭/manifest JSON 기록"""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", by_alias=True)
    _write_text(path, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _write_text(path: Union[str, Path], text: str) -> None:
    path = Path(path)
    if not path.parent.is_dir():
        raise DataError(f"output directory does not exist: {path.parent}")
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
