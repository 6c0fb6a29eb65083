# utils/svm.py
"""
SVM de margem suave sobre matrizes de kernel pré-computadas (quânticas ou clássicas).

O dual é resolvido por SMO com seleção de par de segunda ordem (estilo libsvm):
    min ½ αᵀQα − Σα   sujeito a  yᵀα = 0,  0 <= α_i <= C,   Q_ij = y_i y_j K_ij
Pares com curvatura η = K_ii + K_jj − 2K_ij <= 0 (possível em kernels amostrados levemente
indefinidos) são ignorados na seleção em vez de interromper o treino.
"""
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

import config
from utils.errors import ArgumentError, SpecHashMismatchError
from utils.event_logger import warn_event
from utils.quantum_kernel import KERNEL_TEST, KERNEL_TRAIN, KernelMatrix

STAGE = "SVM"
_CURVATURE_EPS = 1e-12


@dataclass(frozen=True)
class ClassicalKernel:
    kind: str = "rbf"
    degree: int = config.POLYNOMIAL_DEGREE_DEFAULT
    coef0: float = config.KERNEL_COEF0_DEFAULT
    gamma: float = None          # None: 1 / n_features

    def __post_init__(self):
        if self.kind not in config.CLASSICAL_KERNEL_OPTIONS:
            raise ArgumentError(f"Kernel clássico desconhecido: '{self.kind}'. Opções: {config.CLASSICAL_KERNEL_OPTIONS}")
        if self.gamma is not None and float(self.gamma) <= 0:
            raise ArgumentError(f"gamma deve ser > 0, recebeu {self.gamma}")
        if int(self.degree) < 1:
            raise ArgumentError(f"degree deve ser >= 1, recebeu {self.degree}")

    def resolved_gamma(self, n_features: int) -> float:
        return float(self.gamma) if self.gamma is not None else 1.0 / n_features

    def to_dict(self, n_features: int) -> dict:
        params = {"kind": self.kind}
        if self.kind != "linear":
            params["gamma"] = self.resolved_gamma(n_features)
        if self.kind in ("polynomial", "sigmoid"):
            params["coef0"] = float(self.coef0)
        if self.kind == "polynomial":
            params["degree"] = int(self.degree)
        return params


def classical_kernel_matrix(X, Y=None, kernel: ClassicalKernel = ClassicalKernel()) -> KernelMatrix:
    """
    Kernel clássico com linhas = X e colunas = Y. Sem Y, é a matriz de treino K(X, X);
    para teste use classical_kernel_matrix(X_test, X_train).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    kind = KERNEL_TRAIN if Y is None else KERNEL_TEST
    Y = X if Y is None else np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ArgumentError(f"Dimensões incompatíveis: {X.shape[1]} e {Y.shape[1]}")
    n_features = X.shape[1]
    gamma = kernel.resolved_gamma(n_features)
    if kernel.kind == "rbf":
        values = np.exp(-gamma * cdist(X, Y, "sqeuclidean"))
    else:
        dots = X @ Y.T
        if kernel.kind == "linear":
            values = dots
        elif kernel.kind == "polynomial":
            values = (gamma * dots + kernel.coef0) ** int(kernel.degree)
        else:
            values = np.tanh(gamma * dots + kernel.coef0)
    params = kernel.to_dict(n_features)
    digest = hashlib.sha256(json.dumps(params, sort_keys=True).encode("utf-8")).hexdigest()[:16]
    return KernelMatrix(values, kind, kernel_name=kernel.kind, spec_hash=digest, metadata={"kernel": params})


@dataclass(frozen=True, eq=False)
class SVMModel:
    dual_coefficients: np.ndarray   # α_i·y_i para cada amostra de treino (zero fora dos vetores de suporte)
    bias: float
    support_indices: tuple
    labels: np.ndarray
    train_config: dict = field(default_factory=dict)
    spec_hash: str = ""
    iterations: int = 0
    converged: bool = True

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coefficients)

    def to_dict(self) -> dict:
        return {
            "dual_coefficients": [repr(float(v)) for v in self.dual_coefficients],
            "bias": repr(float(self.bias)),
            "support_indices": list(self.support_indices),
            "labels": [int(v) for v in self.labels],
            "train_config": self.train_config,
            "spec_hash": self.spec_hash,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SVMModel":
        return cls(
            dual_coefficients=np.array([float(v) for v in data["dual_coefficients"]]),
            bias=float(data["bias"]),
            support_indices=tuple(data["support_indices"]),
            labels=np.array(data["labels"], dtype=int),
            train_config=data.get("train_config", {}),
            spec_hash=data.get("spec_hash", ""),
            iterations=data.get("iterations", 0),
            converged=data.get("converged", True),
        )


def _as_values(K) -> np.ndarray:
    return K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)


def _check_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ArgumentError(f"Esperados {n} rótulos, recebeu forma {y.shape}")
    if not np.all(np.isin(y, (-1, 1))):
        raise ArgumentError("Rótulos devem ser +1 (malware) ou -1 (benigno)")
    if len(np.unique(y)) < 2:
        raise ArgumentError("Treino exige as duas classes")
    return y.astype(float)


def _violating_gap(alpha, grad, y, C):
    minus_yg = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    g_max = minus_yg[up].max() if up.any() else -np.inf
    g_min = minus_yg[low].min() if low.any() else np.inf
    return g_max, g_min, up, low, minus_yg


def _select_pair(alpha, grad, y, C, K, order):
    """Par (i, j) de máxima violação com seleção de j por segunda ordem; None quando não há par útil."""
    g_max, g_min, up, low, minus_yg = _violating_gap(alpha, grad, y, C)
    scores = np.where(up, minus_yg, -np.inf)[order]
    i = int(order[np.argmax(scores)])
    curvature = K[i, i] + np.diag(K) - 2 * K[i]
    b = g_max - minus_yg
    candidates = low & (minus_yg < g_max) & (curvature > _CURVATURE_EPS)
    if not candidates.any():
        return i, None, g_max - g_min
    gains = np.where(candidates, -(b ** 2) / np.where(candidates, curvature, 1.0), np.inf)[order]
    j = int(order[np.argmin(gains)])
    return i, j, g_max - g_min


def _update_pair(alpha, i, j, y, grad, K, C):
    old_i, old_j = alpha[i], alpha[j]
    quad = max(K[i, i] + K[j, j] - 2 * K[i, j], _CURVATURE_EPS)
    if y[i] != y[j]:
        delta = (-grad[i] - grad[j]) / quad
        diff = alpha[i] - alpha[j]
        alpha[i] += delta
        alpha[j] += delta
        if diff > 0:
            if alpha[j] < 0:
                alpha[j], alpha[i] = 0.0, diff
        elif alpha[i] < 0:
            alpha[i], alpha[j] = 0.0, -diff
        if diff > 0:
            if alpha[i] > C:
                alpha[i], alpha[j] = C, C - diff
        elif alpha[j] > C:
            alpha[j], alpha[i] = C, C + diff
    else:
        delta = (grad[i] - grad[j]) / quad
        total = alpha[i] + alpha[j]
        alpha[i] -= delta
        alpha[j] += delta
        if total > C:
            if alpha[i] > C:
                alpha[i], alpha[j] = C, total - C
        elif alpha[j] < 0:
            alpha[j], alpha[i] = 0.0, total
        if total > C:
            if alpha[j] > C:
                alpha[j], alpha[i] = C, total - C
        elif alpha[i] < 0:
            alpha[i], alpha[j] = 0.0, total
    # Gradiente de ½αᵀQα − Σα
    grad += y * (y[i] * K[:, i] * (alpha[i] - old_i) + y[j] * K[:, j] * (alpha[j] - old_j))


def _compute_bias(alpha, grad, y, C) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yg[free].mean()
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
        ub = yg[ub_mask].min() if ub_mask.any() else np.inf
        lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
        rho = (ub + lb) / 2
    return float(-rho)


def fit_precomputed(K, y, C: float = config.SVM_C_DEFAULT, tol: float = config.SVM_TOL_DEFAULT,
                    max_passes: int = config.SVM_MAX_PASSES_DEFAULT, seed: int = config.SEED_DEFAULT) -> SVMModel:
    """Treina a SVM sobre a matriz de treino K (n x n) e rótulos ±1."""
    values = _as_values(K)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ArgumentError(f"Matriz de treino deve ser quadrada, recebeu forma {values.shape}")
    n = values.shape[0]
    if not np.allclose(values, values.T, atol=1e-8):
        raise ArgumentError("Matriz de treino não é simétrica")
    if C <= 0:
        raise ArgumentError(f"C deve ser > 0, recebeu {C}")
    y = _check_labels(y, n)
    C = float(C)

    order = np.random.default_rng(seed).permutation(n)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    max_iter = int(max_passes) * max(n, 100)
    converged = False
    iterations = 0
    while iterations < max_iter:
        i, j, gap = _select_pair(alpha, grad, y, C, values, order)
        if gap < tol:
            converged = True
            break
        if j is None:
            break
        _update_pair(alpha, i, j, y, grad, values, C)
        iterations += 1
    if not converged:
        warn_event(STAGE, f"SMO não convergiu após {iterations} iterações (tol={tol}); modelo pode violar KKT")

    alpha[alpha < config.SVM_ALPHA_TOL] = 0.0
    support = tuple(int(k) for k in np.flatnonzero(alpha))
    spec_hash = K.spec_hash if isinstance(K, KernelMatrix) else ""
    return SVMModel(
        dual_coefficients=alpha * y,
        bias=_compute_bias(alpha, grad, y, C),
        support_indices=support,
        labels=y.astype(int),
        train_config={"C": C, "tol": tol, "max_passes": int(max_passes), "seed": int(seed)},
        spec_hash=spec_hash,
        iterations=iterations,
        converged=converged,
    )


def decision_function(model: SVMModel, K_test) -> np.ndarray:
    """f(z) = Σ_i coef_i·K(z, x_i) + bias para cada linha de K_test (m x n)."""
    if isinstance(K_test, KernelMatrix) and model.spec_hash and K_test.spec_hash and K_test.spec_hash != model.spec_hash:
        raise SpecHashMismatchError(
            f"Kernel de teste (hash {K_test.spec_hash}) não corresponde ao do modelo (hash {model.spec_hash})")
    values = np.atleast_2d(_as_values(K_test))
    if values.shape[1] != len(model.dual_coefficients):
        raise ArgumentError(
            f"Kernel de teste com {values.shape[1]} colunas para modelo treinado com {len(model.dual_coefficients)} amostras")
    return values @ model.dual_coefficients + model.bias


def predict(model: SVMModel, K_test) -> np.ndarray:
    """Rótulos ±1; decisão exatamente 0 vira +1 (malware)."""
    return np.where(decision_function(model, K_test) >= 0, 1, -1)


def dual_objective(model: SVMModel, K) -> float:
    """W(α) = Σα − ½ Σ α_i α_j y_i y_j K_ij (forma de maximização)."""
    coef = model.dual_coefficients
    return float(np.abs(coef).sum() - 0.5 * coef @ _as_values(K) @ coef)


def kkt_violation(model: SVMModel, K) -> float:
    """Maior violação de par (máximo −y·G em I_up menos mínimo em I_low); 0 quando ótimo."""
    values = _as_values(K)
    y = model.labels.astype(float)
    alpha = model.alphas
    grad = y * (values @ model.dual_coefficients) - 1.0
    g_max, g_min, *_ = _violating_gap(alpha, grad, y, float(model.train_config.get("C", config.SVM_C_DEFAULT)))
    return float(max(0.0, g_max - g_min))


def save_model(model: SVMModel, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        json.dump(model.to_dict(), f, indent=2, sort_keys=True)


def load_model(path: str) -> SVMModel:
    try:
        with open(path) as f:
            return SVMModel.from_dict(json.load(f))
    except FileNotFoundError:
        raise ArgumentError(f"Modelo não encontrado: '{path}'")
