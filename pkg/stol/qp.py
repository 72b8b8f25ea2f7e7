"""
STOL - Working-set dual QP

    max_alpha  -1/2 alpha^T H alpha + b^T alpha
    s.t.       alpha >= 0,  sum(alpha) <= C

H_kk' = dpsi_k . dpsi_k',  b_k = delta_loss_k - source_margin_k.
Solver: 가상 slack 좌표 alpha_0 = C - sum(alpha)를 추가해 sum = C 등식 제약으로
바꾼 뒤 SMO 방식 pairwise coordinate ascent (exact line search).
"""

import logging
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .config import settings
from .errors import DataError, SolverError

logger = logging.getLogger("stol.qp")

# g를 누적 갱신하다 생기는 오차를 주기적으로 제거
_GRADIENT_REFRESH = 256


@dataclass(frozen=True, eq=False)
class ConstraintRecord:
    """joint labeling ybar^k 하나와 캐시된 평균량 (dpsi, Delta, s)"""
    ybar: Tuple[Tuple[int, ...], ...]
    dpsi: np.ndarray
    delta_loss: float
    source_margin: float

    @property
    def linear_term(self) -> float:
        return self.delta_loss - self.source_margin

    def violation(self, w: np.ndarray) -> float:
        """Delta - s - w . dpsi (제약 위반량, xi 제외)"""
        return self.linear_term - float(w @ self.dpsi)


@dataclass
class WorkingSet:
    """cutting-plane working set W (ybar 중복 불가)"""
    records: List[ConstraintRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ConstraintRecord]:
        return iter(self.records)

    def __contains__(self, ybar) -> bool:
        return any(r.ybar == ybar for r in self.records)

    def add(self, record: ConstraintRecord) -> None:
        if record.ybar in self:
            raise SolverError("joint labeling is already in the working set")
        self.records.append(record)

    def gram(self) -> np.ndarray:
        if not self.records:
            return np.zeros((0, 0))
        D = np.vstack([r.dpsi for r in self.records])
        return D @ D.T

    def linear_term(self) -> np.ndarray:
        return np.array([r.linear_term for r in self.records], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DualState:
    """solve_dual 결과"""
    alpha: np.ndarray
    C: float
    objective: float
    residual: float
    updates: int


@dataclass(frozen=True, eq=False)
class PrimalSolution:
    w: np.ndarray
    xi: float


def _check_problem(H, b, C: float) -> Tuple[np.ndarray, np.ndarray]:
    H = np.asarray(H, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = b.shape[0] if b.ndim == 1 else -1
    if b.ndim != 1 or H.shape != (n, n):
        raise DataError(f"H must be |W| x |W| and b of length |W|, got {H.shape} and {b.shape}")
    if not (np.all(np.isfinite(H)) and np.all(np.isfinite(b))):
        raise DataError("H and b must be finite")
    if n and not np.allclose(H, H.T, rtol=1e-10, atol=1e-12):
        raise DataError("H must be symmetric")
    if not (np.isfinite(C) and C > 0):
        raise DataError(f"C must be positive, got {C}")
    return H, b


def dual_objective(H, b, alpha) -> float:
    """-1/2 alpha^T H alpha + b^T alpha"""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.size == 0:
        return 0.0
    return float(-0.5 * alpha @ (np.asarray(H) @ alpha) + np.asarray(b) @ alpha)


def _residual(gradient: np.ndarray, alpha: np.ndarray, scale: float) -> float:
    """확장 좌표(가상 slack 포함)에서의 KKT 위반량"""
    support = alpha > 0
    mu = gradient[support].max()
    stationarity = max(0.0, float((gradient - mu).max()))
    complementarity = float((alpha * np.abs(gradient - mu)).max())
    return max(stationarity, complementarity) / scale


def _extend(alpha: np.ndarray, C: float) -> np.ndarray:
    return np.concatenate([[max(0.0, C - float(alpha.sum()))], alpha])


def kkt_residual(H, b, C: float, alpha) -> float:
    """
    dual 최적성 인증서 (정확한 최적점에서 0)

    g = b - H alpha, 가상 slack 좌표 (alpha_0 = C - sum alpha, g_0 = 0)를 포함해
    mu = support 위 g의 최댓값으로 두고
    max( max_k (g_k - mu)^+ , max_k alpha_k |g_k - mu| ) / max(1, ||b||_inf)
    """
    H, b = _check_problem(H, b, C)
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != b.shape:
        raise DataError(f"alpha has shape {alpha.shape}, expected {b.shape}")
    if np.any(alpha < 0) or alpha.sum() > C + 1e-9:
        raise DataError("alpha is infeasible (needs alpha >= 0 and sum(alpha) <= C)")
    gradient = np.concatenate([[0.0], b - H @ alpha])
    scale = max(1.0, float(np.abs(b).max())) if b.size else 1.0
    return _residual(gradient, _extend(alpha, C), scale)


def solve_dual(H, b, C: float, eps_qp: float = None,
               warm_start: Optional[Sequence[float]] = None,
               max_updates: int = None,
               trace: Optional[List[float]] = None) -> DualState:
    """
    SMO pairwise ascent

    매 단계 (i, j) = (g 최대 좌표, support 중 g 최소 좌표)에 대해 alpha_j에서
    alpha_i로 t만큼 옮긴다 (동률은 가장 작은 index). 0번 좌표는 가상 slack.
    trace가 주어지면 매 update 후 dual objective를 추가한다.
    """
    eps_qp = settings.DEFAULT_EPS_QP if eps_qp is None else eps_qp
    max_updates = settings.QP_MAX_UPDATES if max_updates is None else max_updates
    H, b = _check_problem(H, b, C)
    if not eps_qp > 0:
        raise DataError(f"eps_qp must be positive, got {eps_qp}")

    n = b.shape[0]
    if n == 0:
        return DualState(np.zeros(0), C, 0.0, 0.0, 0)

    start = np.zeros(n)
    if warm_start is not None:
        warm = np.asarray(warm_start, dtype=np.float64)
        if warm.shape[0] > n or np.any(warm < 0):
            raise DataError("warm start must be a nonnegative vector no longer than b")
        start[: warm.shape[0]] = warm
        if start.sum() > C:
            start *= C / start.sum()

    Hx = np.zeros((n + 1, n + 1))
    Hx[1:, 1:] = H
    bx = np.concatenate([[0.0], b])
    alpha = _extend(start, C)
    gradient = bx - Hx @ alpha
    scale = max(1.0, float(np.abs(b).max()))
    objective = dual_objective(H, b, alpha[1:])

    updates = 0
    while True:
        residual = _residual(gradient, alpha, scale)
        if residual <= eps_qp:
            gradient = bx - Hx @ alpha
            residual = _residual(gradient, alpha, scale)
            if residual <= eps_qp:
                break
        if updates >= max_updates:
            raise SolverError(f"dual QP did not reach KKT residual {eps_qp:g} within "
                              f"{max_updates} pair updates (residual {residual:.3e})")

        i = int(np.argmax(gradient))
        j = int(np.argmin(np.where(alpha > 0, gradient, np.inf)))
        gap = gradient[i] - gradient[j]
        if gap <= 0:
            break

        eta = Hx[i, i] + Hx[j, j] - 2.0 * Hx[i, j]
        step = alpha[j] if eta <= 1e-15 else min(alpha[j], gap / eta)
        alpha[i] += step
        if step == alpha[j]:
            alpha[j] = 0.0
        else:
            alpha[j] -= step
        updates += 1

        if updates % _GRADIENT_REFRESH == 0:
            gradient = bx - Hx @ alpha
        else:
            gradient -= step * (Hx[:, i] - Hx[:, j])

        if trace is not None:
            objective += step * gap - 0.5 * eta * step * step
            trace.append(objective)

    result = alpha[1:].copy()
    state = DualState(result, C, dual_objective(H, b, result), residual, updates)
    logger.debug(f"dual solved: |W|={n}, updates={updates}, objective={state.objective:.6g}, "
                 f"residual={residual:.2e}")
    return state


def recover_w(records: WorkingSet, alpha, m: Optional[int] = None) -> np.ndarray:
    """
    w = sum_k alpha_k dpsi_k

    빈 working set에서는 dpsi로 차원을 알 수 없으므로 m을 받아 zero vector를 반환한다.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (len(records),):
        raise DataError(f"alpha has shape {alpha.shape}, expected ({len(records)},)")
    if not len(records):
        if m is None:
            raise DataError("cannot recover w from an empty working set without its dimension m")
        return np.zeros(m)
    return alpha @ np.vstack([r.dpsi for r in records])


def primal_slack(records: WorkingSet, w) -> float:
    """working set 위에서 가장 작은 feasible xi"""
    w = np.asarray(w, dtype=np.float64)
    xi = 0.0
    for record in records:
        if record.dpsi.shape != w.shape:
            raise DataError(f"w has shape {w.shape}, expected {record.dpsi.shape}")
        xi = max(xi, record.violation(w))
    return xi


def solve_primal(records: WorkingSet, C: float, eps_qp: float = None,
                 warm_start: Optional[Sequence[float]] = None) -> Tuple[DualState, PrimalSolution]:
    """dual을 풀고 (w, xi) 복원"""
    state = solve_dual(records.gram(), records.linear_term(), C, eps_qp, warm_start=warm_start)
    w = recover_w(records, state.alpha)
    return state, PrimalSolution(w, primal_slack(records, w))
