# commands/kernel.py
import json
import os

import config
from commands import new_run_id, success, warning
from utils import backend as qbackend
from utils.errors import ArgumentError, UnsupportedCombinationError
from utils.event_logger import record_log
from utils.feature_maps import preset_spec
from utils.preprocess import load_dataset
from utils.quantum_kernel import (ComputeUncompute, ExactOverlap, clip_negative_eigenvalues, evaluate_test_matrix,
                                  evaluate_train_matrix, save_kernel_matrix)
from utils.svm import ClassicalKernel, classical_kernel_matrix

STAGE = "Kernel"
TRAIN_FILE = "kernel_train.csv"
TEST_FILE = "kernel_test.csv"


def register(subparsers):
    parser = subparsers.add_parser("kernel", help="Matrizes de kernel (direto ou pelo backend simulado)")
    parser.add_argument("--dataset", help="CSV gerado por `preprocess`")
    kind = parser.add_mutually_exclusive_group()
    kind.add_argument("--feature-map", choices=config.FEATURE_MAP_OPTIONS, default="zz")
    kind.add_argument("--classical", choices=config.CLASSICAL_KERNEL_OPTIONS, help="Kernel clássico de referência")
    parser.add_argument("--reps", type=int, default=config.REPS_DEFAULT)
    parser.add_argument("--entanglement", choices=config.ENTANGLEMENT_OPTIONS, default=config.ENTANGLEMENT_DEFAULT)
    parser.add_argument("--angle-scale", type=float, default=config.ANGLE_SCALE_DEFAULT)
    parser.add_argument("--method", choices=config.KERNEL_METHOD_OPTIONS, default="exact")
    parser.add_argument("--shots", type=int, default=config.SHOTS_DEFAULT)
    parser.add_argument("--seed", type=int, default=config.SEED_DEFAULT)
    target = parser.add_mutually_exclusive_group()
    target.add_argument("--backend", metavar="PERFIL", help="Perfil embutido (torino, algiers, cairo, kyoto) ou JSON")
    target.add_argument("--direct", action="store_true", help="Avaliação no processo (padrão)")
    parser.add_argument("--mode", choices=config.KERNEL_MODE_OPTIONS, default="all")
    parser.add_argument("--session-dir", help="Diretório da sessão do backend")
    parser.add_argument("--circuits-per-job", type=int, default=1, help="Circuitos por job (1 = um job por entrada)")
    parser.add_argument("--psd-clip", action="store_true", help="Zera autovalores negativos da matriz de treino")
    parser.add_argument("--workers", type=int, default=None, help="Threads para avaliação das entradas")
    parser.add_argument("--out", help="Diretório de saída das matrizes")
    parser.set_defaults(handler=run)


def _require(value, flag: str):
    if value in (None, ""):
        raise ArgumentError(f"{flag} é obrigatório neste modo")
    return value


def _write_matrices(out_dir: str, train, test, psd_clip: bool):
    if psd_clip:
        train.values = clip_negative_eigenvalues(train.values)
        train.metadata["psd_clip"] = True
    os.makedirs(out_dir, exist_ok=True)
    save_kernel_matrix(train, os.path.join(out_dir, TRAIN_FILE))
    if test is not None:
        save_kernel_matrix(test, os.path.join(out_dir, TEST_FILE))


def _run_direct(args, run_id: str):
    train_set, test_set, _ = load_dataset(_require(args.dataset, "--dataset"))
    out_dir = _require(args.out, "--out")
    if args.classical:
        kernel = ClassicalKernel(args.classical)
        train = classical_kernel_matrix(train_set.features, kernel=kernel)
        test = classical_kernel_matrix(test_set.features, train_set.features, kernel) if len(test_set) else None
    else:
        spec = preset_spec(args.feature_map, train_set.features.shape[1], reps=args.reps,
                           entanglement=args.entanglement, angle_scale=args.angle_scale)
        method = ComputeUncompute(args.shots, args.seed) if args.method == "sampled" else ExactOverlap()
        train = evaluate_train_matrix(train_set.features, spec, method, max_workers=args.workers)
        test = (evaluate_test_matrix(test_set.features, train_set.features, spec, method, max_workers=args.workers)
                if len(test_set) else None)
    _write_matrices(out_dir, train, test, args.psd_clip)
    record_log(run_id, None, STAGE, "Matrizes Gravadas", f"{train.shape} / {None if test is None else test.shape} -> {out_dir}")
    success(f"Matriz de treino {train.shape[0]}x{train.shape[1]}"
            + (f" e de teste {test.shape[0]}x{test.shape[1]}" if test is not None else "") + f" salvas em {out_dir}")


def _submit(args, store, profile, run_id: str):
    train_set, test_set, _ = load_dataset(_require(args.dataset, "--dataset"))
    spec = preset_spec(args.feature_map, train_set.features.shape[1], reps=args.reps,
                       entanglement=args.entanglement, angle_scale=args.angle_scale)
    method = ComputeUncompute(args.shots, args.seed)
    metadata = {"n_train": len(train_set), "n_test": len(test_set),
                "feature_map": spec.to_dict(), "method": method.to_dict()}
    session = qbackend.open_session(store, os.path.basename(os.path.normpath(store.directory)), profile, metadata)
    if session.job_ids:
        if session.metadata != metadata:
            raise ArgumentError(f"Sessão '{session.id}' já contém jobs de outra configuração")
        warning(f"Sessão '{session.id}' já submetida ({len(session.job_ids)} jobs); nada a fazer")
        return
    pairs = qbackend.prepare_kernel_pairs(train_set.features, test_set.features, spec, profile, args.seed)
    job_ids = qbackend.submit_kernel_jobs(pairs, profile, args.shots, store, session, args.circuits_per_job)
    record_log(run_id, session.id, STAGE, "Submissão", f"{len(job_ids)} job(s) em {profile.name}")
    success(f"{len(job_ids)} job(s) submetido(s) à sessão '{session.id}' ({profile.name})")


def _run_backend(args, run_id: str):
    if args.classical:
        raise UnsupportedCombinationError("Kernels clássicos não usam o backend quântico")
    if args.method != "sampled":
        raise UnsupportedCombinationError("O backend estima fidelidades por amostragem: use --method sampled")
    profile = qbackend.get_profile(args.backend)
    store = qbackend.JobStore(_require(args.session_dir, "--session-dir"))
    with store.lock():
        if args.mode in ("submit", "all"):
            _submit(args, store, profile, run_id)
        if args.mode in ("run", "all"):
            completed = qbackend.run_pending(store, profile)
            success(f"{completed} job(s) executado(s) em {profile.name}")
        if args.mode in ("collect", "all"):
            out_dir = _require(args.out, "--out")
            train, test = qbackend.assemble_session_matrices(store)
            _write_matrices(out_dir, train, test if test.shape[0] else None, args.psd_clip)
            success(f"Matrizes da sessão coletadas em {out_dir}")
        if args.mode == "status":
            print(json.dumps(qbackend.session_report(store), indent=2, sort_keys=True))


def run(args) -> int:
    run_id = new_run_id()
    target = args.backend or "direto"
    record_log(run_id, None, STAGE, "Comando Iniciado",
               f"map={args.classical or args.feature_map} method={args.method} shots={args.shots} backend={target} mode={args.mode}")
    if args.backend:
        _run_backend(args, run_id)
    else:
        if args.mode not in ("all",):
            raise UnsupportedCombinationError(f"--mode {args.mode} exige --backend")
        _run_direct(args, run_id)
    return config.EXIT_OK
