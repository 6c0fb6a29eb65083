# commands/preprocess.py
import config
from commands import new_run_id, parse_angle_range, parse_image_size, success
from utils.errors import ArgumentError
from utils.event_logger import record_log
from utils.preprocess import generate_synthetic, load_binary_corpus, preprocess_corpus, reduce_dataset, save_dataset

STAGE = "Pre-processamento"


def register(subparsers):
    parser = subparsers.add_parser("preprocess", help="Binários brutos (ou dados sintéticos) -> dataset de ângulos")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--input-dir", help="Diretório com os arquivos binários")
    source.add_argument("--synthetic", type=int, metavar="N", help="Gera N amostras sintéticas (duas gaussianas)")
    parser.add_argument("--labels", help="CSV filename,label (1 = malware, 0 = benigno)")
    parser.add_argument("--image-size", type=parse_image_size, default=config.IMAGE_SIZE_DEFAULT, metavar="LxA")
    parser.add_argument("--qubits", type=int, required=True, help="Dimensão final (PCA) = número de qubits")
    parser.add_argument("--angle-range", type=parse_angle_range, default=config.ANGLE_RANGE_DEFAULT, metavar="LO,HI")
    parser.add_argument("--seed", type=int, default=config.SEED_DEFAULT)
    parser.add_argument("--n-train", type=int, help="Amostras de treino (par); padrão: maior divisão balanceada")
    parser.add_argument("--n-test", type=int, help="Amostras de teste (par)")
    parser.add_argument("--test-fraction", type=float, default=config.TEST_FRACTION_DEFAULT)
    parser.add_argument("--pca-fit-all", action="store_true", help="Ajusta o PCA em treino+teste")
    parser.add_argument("--dims", type=int, default=config.EXPERIMENT_DATA_DIMS_DEFAULT, help="Dimensão dos dados sintéticos")
    parser.add_argument("--separation", type=float, default=config.EXPERIMENT_SEPARATION_DEFAULT)
    parser.add_argument("--workers", type=int, default=None, help="Processos para a conversão de imagens")
    parser.add_argument("--out", required=True, help="CSV de saída (sidecar JSON ao lado)")
    parser.set_defaults(handler=run)


def _synthetic_dataset(args) -> tuple:
    raw = generate_synthetic(args.synthetic, args.dims, args.separation, args.seed)
    return reduce_dataset(
        raw, args.qubits, angle_range=args.angle_range, seed=args.seed, n_train=args.n_train, n_test=args.n_test,
        test_fraction=args.test_fraction, pca_fit_all=args.pca_fit_all,
        metadata={"source": "synthetic", "n": args.synthetic, "dims": args.dims, "separation": args.separation})


def run(args) -> int:
    run_id = new_run_id()
    record_log(run_id, None, STAGE, "Comando Iniciado", f"qubits={args.qubits} seed={args.seed} out={args.out}")
    if args.synthetic is not None:
        train, test, metadata = _synthetic_dataset(args)
    else:
        if not args.labels:
            raise ArgumentError("--labels é obrigatório com --input-dir")
        corpus = load_binary_corpus(args.input_dir, args.labels)
        train, test, metadata = preprocess_corpus(
            corpus, args.qubits, image_size=args.image_size, angle_range=args.angle_range, seed=args.seed,
            n_train=args.n_train, n_test=args.n_test, test_fraction=args.test_fraction,
            pca_fit_all=args.pca_fit_all, max_workers=args.workers)
    save_dataset(args.out, train, test, metadata)
    record_log(run_id, None, STAGE, "Dataset Gravado", f"{len(train)} treino / {len(test)} teste -> {args.out}")
    success(f"Dataset com {len(train)} amostras de treino e {len(test)} de teste ({args.qubits} dimensões) salvo em {args.out}")
    return config.EXIT_OK
