"""
STOL - Errors

DataError 계열은 CLI에서 exit 2, SolverError는 실패 보고로 매핑된다.
"""

from typing import Optional


class StolError(Exception):
    """STOL 기본 예외"""


class DataError(StolError, ValueError):
    """입력 데이터/모양/전제조건 위반"""


class DataFormatError(DataError):
    """파일 파싱 오류 (경로 + 라인 번호)"""

    def __init__(self, path: str, message: str, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


class SolverError(StolError, RuntimeError):
    """QP 수렴 실패 등 수치 오류"""
