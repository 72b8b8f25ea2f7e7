"""
STOL - 독립 테스트 오라클

구현 코드를 쓰지 않고 정의로부터 다시 계산한다.
"""

import itertools

import numpy as np
from scipy.optimize import minimize


def accumulate_features(d, K, x, y):
    """위치별 누적으로 Psi(x, y) 계산"""
    psi = np.zeros(d * K + K * K)
    for t in range(len(y)):
        for j in range(d):
            psi[y[t] * d + j] += x[t][j]
        if t > 0:
            psi[d * K + y[t - 1] * K + y[t]] += 1.0
    return psi


def hamming(y, ybar):
    return sum(1 for a, b in zip(y, ybar) if a != b) / len(y)


def qp_value(H, b, alpha):
    return float(-0.5 * alpha @ H @ alpha + b @ alpha)


def active_set_qp(H, b, C, tol=1e-10):
    """
    max -1/2 a^T H a + b^T a  s.t. a >= 0, sum(a) <= C

    가능한 모든 support 집합 S에 대해 (sum(alpha) <= C 제약 비활성 / 활성) 등식 시스템을 풀고
    feasible 해 중 최댓값을 반환. 등식 시스템은 lstsq로 풀어 H가 singular
    (중복 dpsi, zero dpsi)여도 동작한다. 최적해는 항상 등식 시스템이 유일해를 갖는
    support 위에 존재하고, 나머지 후보는 feasible이면 하한일 뿐이다.
    """
    n = len(b)
    best_alpha, best_value = np.zeros(n), 0.0
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            idx = list(support)
            H_s = H[np.ix_(idx, idx)]
            candidates = []
            candidates.append(np.linalg.lstsq(H_s, b[idx], rcond=None)[0])
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = H_s
            kkt[:size, size] = 1.0
            kkt[size, :size] = 1.0
            rhs = np.concatenate([b[idx], [C]])
            candidates.append(np.linalg.lstsq(kkt, rhs, rcond=None)[0][:size])
            for a_s in candidates:
                if np.any(a_s < -tol) or a_s.sum() > C + tol:
                    continue
                alpha = np.zeros(n)
                alpha[idx] = np.clip(a_s, 0.0, None)
                value = qp_value(H, b, alpha)
                if value > best_value:
                    best_alpha, best_value = alpha, value
    return best_alpha, best_value


def all_joint_constraints(theta, d, K, xs, ys):
    """모든 joint labeling의 (dpsi, b = Delta - s) 열거"""
    l = len(xs)
    per_sample = [list(itertools.product(range(K), repeat=len(y))) for y in ys]
    dpsis, bs = [], []
    theta = np.asarray(theta, dtype=np.float64)
    for joint in itertools.product(*per_sample):
        dpsi = np.zeros(d * K + K * K)
        loss = 0.0
        margin = 0.0
        for x, y, ybar in zip(xs, ys, joint):
            diff = accumulate_features(d, K, x, y) - accumulate_features(d, K, x, ybar)
            dpsi += diff
            loss += hamming(y, ybar)
            margin += float(theta @ diff)
        dpsis.append(dpsi / l)
        bs.append((loss - margin) / l)
    return np.array(dpsis), np.array(bs)


def primal_optimum(dpsis, bs, C):
    """min 1/2 ||w||^2 + C xi  s.t. xi >= b_k - w . dpsi_k, xi >= 0  (SLSQP)"""
    m = dpsis.shape[1]

    def fun(z):
        return 0.5 * z[:m] @ z[:m] + C * z[m]

    def jac(z):
        return np.concatenate([z[:m], [C]])

    constraints = [
        {"type": "ineq",
         "fun": lambda z: z[m] - bs + dpsis @ z[:m],
         "jac": lambda z: np.hstack([dpsis, np.ones((len(bs), 1))])},
        {"type": "ineq", "fun": lambda z: np.array([z[m]]),
         "jac": lambda z: np.concatenate([np.zeros(m), [1.0]])[None, :]},
    ]
    z0 = np.concatenate([np.zeros(m), [max(0.0, float(bs.max()))]])
    result = minimize(fun, z0, jac=jac, constraints=constraints, method="SLSQP",
                      options={"ftol": 1e-14, "maxiter": 1000})
    return result.x[:m], float(result.fun)
