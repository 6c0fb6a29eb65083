# commands/model.py
import json
import os

import numpy as np
import pandas as pd

import config
from commands import new_run_id, success
from utils.errors import ArgumentError
from utils.event_logger import record_log
from utils.metrics import confusion, metrics_report
from utils.preprocess import load_dataset
from utils.quantum_kernel import KERNEL_TEST, KERNEL_TRAIN, load_kernel_matrix
from utils.svm import decision_function, fit_precomputed, load_model, save_model

STAGE = "Modelo"
PREDICTION_COLUMNS = ["index", "decision", "prediction"]


def register(subparsers):
    train = subparsers.add_parser("train", help="Treina a SVM com a matriz de treino pré-computada")
    train.add_argument("--kernel", required=True, help="CSV da matriz de treino")
    train.add_argument("--dataset", required=True, help="Dataset com os rótulos de treino")
    train.add_argument("--C", type=float, default=config.SVM_C_DEFAULT)
    train.add_argument("--tol", type=float, default=config.SVM_TOL_DEFAULT)
    train.add_argument("--max-passes", type=int, default=config.SVM_MAX_PASSES_DEFAULT)
    train.add_argument("--seed", type=int, default=config.SEED_DEFAULT)
    train.add_argument("--out", required=True, help="JSON do modelo")
    train.set_defaults(handler=run_train)

    predict = subparsers.add_parser("predict", help="Prediz rótulos a partir da matriz de teste")
    predict.add_argument("--model", required=True)
    predict.add_argument("--kernel", required=True, help="CSV da matriz de teste")
    predict.add_argument("--out", required=True, help="CSV de predições")
    predict.set_defaults(handler=run_predict)

    evaluate = subparsers.add_parser("evaluate", help="Métricas das predições contra os rótulos de teste")
    evaluate.add_argument("--predictions", required=True)
    evaluate.add_argument("--dataset", required=True, help="Dataset com os rótulos de teste")
    evaluate.add_argument("--out", required=True, help="JSON de métricas")
    evaluate.set_defaults(handler=run_evaluate)


def run_train(args) -> int:
    run_id = new_run_id()
    kernel = load_kernel_matrix(args.kernel)
    if kernel.kind != KERNEL_TRAIN:
        raise ArgumentError(f"'{args.kernel}' é uma matriz de {kernel.kind}, esperada de treino")
    train_set, _, _ = load_dataset(args.dataset)
    model = fit_precomputed(kernel, train_set.labels, C=args.C, tol=args.tol, max_passes=args.max_passes, seed=args.seed)
    save_model(model, args.out)
    record_log(run_id, None, STAGE, "Modelo Treinado",
               f"{len(model.support_indices)} vetor(es) de suporte, {model.iterations} iterações, hash {model.spec_hash}")
    success(f"Modelo com {len(model.support_indices)} vetores de suporte salvo em {args.out}")
    return config.EXIT_OK


def run_predict(args) -> int:
    run_id = new_run_id()
    model = load_model(args.model)
    kernel = load_kernel_matrix(args.kernel)
    if kernel.kind != KERNEL_TEST:
        raise ArgumentError(f"'{args.kernel}' é uma matriz de {kernel.kind}, esperada de teste")
    decisions = decision_function(model, kernel)
    predictions = pd.DataFrame({
        "index": np.arange(len(decisions)),
        "decision": decisions,
        "prediction": np.where(decisions >= 0, 1, -1),
    }, columns=PREDICTION_COLUMNS)
    directory = os.path.dirname(args.out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    predictions.to_csv(args.out, index=False, float_format="%.17g")
    record_log(run_id, None, STAGE, "Predições Gravadas", f"{len(predictions)} amostra(s) -> {args.out}")
    success(f"{len(predictions)} predições salvas em {args.out}")
    return config.EXIT_OK


def run_evaluate(args) -> int:
    run_id = new_run_id()
    try:
        predictions = pd.read_csv(args.predictions)
    except FileNotFoundError:
        raise ArgumentError(f"Predições não encontradas: '{args.predictions}'")
    _, test_set, _ = load_dataset(args.dataset)
    report = metrics_report(confusion(test_set.labels, predictions["prediction"].to_numpy()))
    directory = os.path.dirname(args.out)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(args.out, "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    record_log(run_id, None, STAGE, "Avaliação", f"acc={report['accuracy']:.4f} f1={report['f1']:.4f}")
    success(f"Acurácia {report['accuracy']:.4f} | Precisão {report['precision']:.4f} | "
            f"Recall {report['recall']:.4f} | F1 {report['f1']:.4f}")
    return config.EXIT_OK
