# utils/metrics.py
"""Métricas por contagens de confusão. Classe positiva = malware (+1)."""
from dataclasses import asdict, dataclass

import numpy as np

from utils.errors import ArgumentError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ArgumentError(f"Contagens de confusão negativas: {self}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion(y_true, y_pred) -> ConfusionCounts:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ArgumentError(f"Tamanhos diferentes: {y_true.shape} e {y_pred.shape}")
    if y_true.size == 0:
        raise ArgumentError("Nenhuma amostra para avaliar")
    positive_true, positive_pred = y_true == 1, y_pred == 1
    return ConfusionCounts(
        tp=int(np.sum(positive_true & positive_pred)),
        tn=int(np.sum(~positive_true & ~positive_pred)),
        fp=int(np.sum(~positive_true & positive_pred)),
        fn=int(np.sum(positive_true & ~positive_pred)),
    )


def _ratio(numerator: int, denominator: int) -> float:
    # Denominador zero vale 0, evitando erros de divisão
    return numerator / denominator if denominator else 0.0


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise ArgumentError("Acurácia indefinida sem amostras")
    return (c.tp + c.tn) / c.total


def precision(c: ConfusionCounts) -> float:
    return _ratio(c.tp, c.tp + c.fp)


def recall(c: ConfusionCounts) -> float:
    return _ratio(c.tp, c.tp + c.fn)


def f1(c: ConfusionCounts) -> float:
    return _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)


def metrics_report(c: ConfusionCounts) -> dict:
    return {
        "accuracy": accuracy(c),
        "precision": precision(c),
        "recall": recall(c),
        "f1": f1(c),
        "counts": asdict(c),
    }
