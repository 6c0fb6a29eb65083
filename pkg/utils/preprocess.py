# utils/preprocess.py
"""
Pipeline de pré-processamento: bytes brutos -> imagem em tons de cinza (largura pelo tamanho do
arquivo) -> redimensionamento -> vetor -> PCA -> escala para ângulos -> divisão balanceada.
"""
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from PIL import Image

import config
from utils.errors import ArgumentError, ConfigurationError
from utils.event_logger import warn_event

STAGE = "Pre-processamento"
POSITIVE_LABEL = 1     # malware
NEGATIVE_LABEL = -1    # benigno


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    pixels: np.ndarray   # uint8, forma (altura, largura)

    def __post_init__(self):
        pixels = np.asarray(self.pixels, dtype=np.uint8)
        if pixels.ndim != 2 or pixels.size == 0:
            raise ArgumentError(f"Imagem deve ser 2D e não vazia, recebeu forma {pixels.shape}")
        object.__setattr__(self, "pixels", pixels)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class WidthSchedule:
    breakpoints: tuple = tuple(config.WIDTH_SCHEDULE_DEFAULT)   # (tamanho máximo em bytes, largura)
    fallback: int = config.WIDTH_SCHEDULE_FALLBACK

    def __post_init__(self):
        breakpoints = tuple((int(size), int(width)) for size, width in self.breakpoints)
        sizes = [size for size, _ in breakpoints]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ArgumentError(f"Tamanhos do esquema de largura devem ser estritamente crescentes: {sizes}")
        if any(width < 1 for _, width in breakpoints) or int(self.fallback) < 1:
            raise ArgumentError("Larguras do esquema devem ser positivas")
        object.__setattr__(self, "breakpoints", breakpoints)

    def width_for(self, num_bytes: int) -> int:
        for max_size, width in self.breakpoints:
            if num_bytes <= max_size:
                return width
        return int(self.fallback)

    def to_dict(self) -> dict:
        return {"breakpoints": [list(b) for b in self.breakpoints], "fallback": int(self.fallback)}


def bytes_to_image(data: bytes, schedule: WidthSchedule = WidthSchedule()) -> GrayscaleImage:
    """Cada byte vira um pixel; a última linha é completada com zeros."""
    if len(data) == 0:
        raise ArgumentError("Conteúdo binário vazio")
    values = np.frombuffer(bytes(data), dtype=np.uint8)
    width = schedule.width_for(len(values))
    height = math.ceil(len(values) / width)
    pixels = np.zeros(width * height, dtype=np.uint8)
    pixels[:len(values)] = values
    return GrayscaleImage(pixels.reshape(height, width))


def resize(img: GrayscaleImage, target: tuple) -> GrayscaleImage:
    """
    Escala preservando a proporção para caber em `target` (largura, altura), vizinho mais próximo,
    e completa com zeros à direita/abaixo até exatamente o tamanho alvo.
    """
    target_w, target_h = int(target[0]), int(target[1])
    if target_w < 1 or target_h < 1:
        raise ArgumentError(f"Tamanho alvo inválido: {target}")
    if (img.width, img.height) == (target_w, target_h):
        return img
    scale = min(target_w / img.width, target_h / img.height)
    new_w = min(target_w, max(1, round(img.width * scale)))
    new_h = min(target_h, max(1, round(img.height * scale)))
    scaled = Image.fromarray(img.pixels).resize((new_w, new_h), Image.Resampling.NEAREST)
    canvas = np.zeros((target_h, target_w), dtype=np.uint8)
    canvas[:new_h, :new_w] = np.asarray(scaled, dtype=np.uint8)
    return GrayscaleImage(canvas)


def image_features(data: bytes, image_size: tuple = config.IMAGE_SIZE_DEFAULT,
                   schedule: WidthSchedule = WidthSchedule()) -> np.ndarray:
    """Bytes -> imagem -> redimensionamento -> vetor achatado em [0, 1]."""
    return resize(bytes_to_image(data, schedule), image_size).pixels.reshape(-1) / 255.0


@dataclass(frozen=True, eq=False)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray            # k x d, linhas ortonormais
    explained_variance: np.ndarray    # não crescente

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PCAModel":
        return cls(np.array(data["mean"]), np.array(data["components"]), np.array(data["explained_variance"]))


def fit_pca(features, k: int) -> PCAModel:
    """
    Componentes principais dos dados centrados (SVD, equivalente à autodecomposição da covariância).
    Sinal: a entrada de maior módulo de cada componente é positiva.
    """
    features = np.asarray(features, dtype=float)
    n, d = features.shape
    if k < 1 or k > min(n, d):
        raise ArgumentError(f"Dimensão alvo k={k} inválida para {n} amostras x {d} dimensões (k <= {min(n, d)})")
    mean = features.mean(axis=0)
    _, singular_values, vt = np.linalg.svd(features - mean, full_matrices=False)
    components = vt[:k].copy()
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivots])
    components *= np.where(signs == 0, 1.0, signs)[:, None]
    explained = singular_values[:k] ** 2 / max(n - 1, 1)
    if not np.allclose(components @ components.T, np.eye(k), atol=1e-8):
        raise ConfigurationError("Componentes do PCA não são ortonormais")
    if np.any(np.diff(explained) > 1e-12 * max(1.0, explained[0])):
        raise ConfigurationError("Variâncias explicadas do PCA fora de ordem")
    return PCAModel(mean, components, explained)


def transform_pca(model: PCAModel, features) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.shape[1] != model.mean.shape[0]:
        raise ArgumentError(f"PCA ajustado com {model.mean.shape[0]} dimensões, recebeu {features.shape[1]}")
    return (features - model.mean) @ model.components.T


def inverse_transform_pca(model: PCAModel, reduced) -> np.ndarray:
    return np.asarray(reduced, dtype=float) @ model.components + model.mean


@dataclass(frozen=True, eq=False)
class AngleScaler:
    """Mapa afim min-max por dimensão para [lo, hi]; colunas constantes vão ao ponto médio."""
    lo: float
    hi: float
    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, features, angle_range: tuple = config.ANGLE_RANGE_DEFAULT) -> "AngleScaler":
        lo, hi = float(angle_range[0]), float(angle_range[1])
        if not hi > lo:
            raise ArgumentError(f"Intervalo de ângulos inválido: ({lo}, {hi})")
        features = np.asarray(features, dtype=float)
        return cls(lo, hi, features.min(axis=0), features.max(axis=0))

    def transform(self, features) -> np.ndarray:
        features = np.asarray(features, dtype=float)
        span = self.maxs - self.mins
        constant = span == 0
        unit = (features - self.mins) / np.where(constant, 1.0, span)
        unit = np.where(constant, 0.5, unit)
        return np.clip(self.lo + unit * (self.hi - self.lo), self.lo, self.hi)

    def to_dict(self) -> dict:
        return {"range": [self.lo, self.hi], "mins": self.mins.tolist(), "maxs": self.maxs.tolist()}


def scale_to_angles(features, angle_range: tuple = config.ANGLE_RANGE_DEFAULT) -> np.ndarray:
    return AngleScaler.fit(features, angle_range).transform(features)


@dataclass(eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.features) != len(self.labels):
            raise ArgumentError(f"{len(self.features)} linhas para {len(self.labels)} rótulos")
        if not np.all(np.isin(self.labels, (POSITIVE_LABEL, NEGATIVE_LABEL))):
            raise ArgumentError("Rótulos devem ser +1 (malware) ou -1 (benigno)")

    def __len__(self):
        return len(self.labels)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.features[indices], self.labels[indices], {**self.metadata, "indices": indices.tolist()})


def balanced_split(dataset: Dataset, n_train: int, n_test: int, seed: int = config.SEED_DEFAULT) -> tuple:
    """Treino e teste disjuntos, cada um com metade de cada classe, reprodutíveis pela semente."""
    if n_train < 2 or n_train % 2 or n_test < 0 or n_test % 2:
        raise ArgumentError(f"n_train e n_test devem ser pares (n_train >= 2), recebeu {n_train} e {n_test}")
    rng = np.random.default_rng(seed)
    per_class_train, per_class_test = n_train // 2, n_test // 2
    train_idx, test_idx = [], []
    for label in (POSITIVE_LABEL, NEGATIVE_LABEL):
        members = np.flatnonzero(dataset.labels == label)
        if len(members) < per_class_train + per_class_test:
            raise ArgumentError(
                f"Classe {label:+d} tem {len(members)} amostras; necessárias {per_class_train + per_class_test}")
        members = rng.permutation(members)
        train_idx.extend(members[:per_class_train])
        test_idx.extend(members[per_class_train:per_class_train + per_class_test])
    train_idx = rng.permutation(np.array(train_idx, dtype=int))
    test_idx = rng.permutation(np.array(test_idx, dtype=int))
    return dataset.subset(train_idx), dataset.subset(test_idx)


def default_split_sizes(labels, test_fraction: float = config.TEST_FRACTION_DEFAULT) -> tuple:
    """Maior divisão balanceada possível: 2·min(classes) amostras, teste = fração arredondada para baixo ao par."""
    labels = np.asarray(labels)
    n_total = 2 * int(min(np.sum(labels == POSITIVE_LABEL), np.sum(labels == NEGATIVE_LABEL)))
    n_test = int(n_total * test_fraction) // 2 * 2
    return n_total - n_test, n_test


def generate_synthetic(n: int, dims: int, separation: float, seed: int = config.SEED_DEFAULT) -> Dataset:
    """Duas gaussianas unitárias em ±separation/2 ao longo de uma direção aleatória."""
    if n < 2 or n % 2:
        raise ArgumentError(f"n deve ser par e >= 2, recebeu {n}")
    if dims < 1:
        raise ArgumentError(f"dims deve ser >= 1, recebeu {dims}")
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=dims)
    direction /= np.linalg.norm(direction)
    labels = np.repeat([POSITIVE_LABEL, NEGATIVE_LABEL], n // 2)
    features = rng.normal(size=(n, dims)) + labels[:, None] * (separation / 2) * direction
    order = rng.permutation(n)
    return Dataset(features[order], labels[order],
                   {"source": "synthetic", "n": n, "dims": dims, "separation": separation, "seed": seed})


def load_binary_corpus(input_dir: str, labels_csv: str) -> list:
    """[(nome, bytes, rótulo ±1)] na ordem do CSV de rótulos (`filename,label`, label 1 = malware)."""
    try:
        labels = pd.read_csv(labels_csv, dtype={"filename": str})
    except FileNotFoundError:
        raise ArgumentError(f"Arquivo de rótulos não encontrado: '{labels_csv}'")
    missing_columns = set(config.LABELS_CSV_COLUMNS) - set(labels.columns)
    if missing_columns:
        raise ArgumentError(f"Arquivo de rótulos sem as colunas {sorted(missing_columns)}")
    if not labels["label"].isin([0, 1]).all():
        raise ArgumentError("Rótulos do CSV devem ser 0 (benigno) ou 1 (malware)")
    missing_files = [name for name in labels["filename"] if not os.path.isfile(os.path.join(input_dir, name))]
    if missing_files:
        raise ArgumentError(f"{len(missing_files)} arquivo(s) do CSV não encontrado(s) em '{input_dir}': {missing_files[:5]}")
    unlabeled = sorted(set(os.listdir(input_dir)) - set(labels["filename"]))
    if unlabeled:
        warn_event(STAGE, f"{len(unlabeled)} arquivo(s) sem rótulo ignorado(s) em '{input_dir}'")
    corpus = []
    for name, label in zip(labels["filename"], labels["label"]):
        with open(os.path.join(input_dir, name), "rb") as f:
            corpus.append((name, f.read(), POSITIVE_LABEL if int(label) == 1 else NEGATIVE_LABEL))
    return corpus


def reduce_dataset(raw: Dataset, qubits: int, angle_range: tuple = config.ANGLE_RANGE_DEFAULT,
                   seed: int = config.SEED_DEFAULT, n_train: int = None, n_test: int = None,
                   test_fraction: float = config.TEST_FRACTION_DEFAULT, pca_fit_all: bool = False,
                   metadata: dict = None) -> tuple:
    """Divisão balanceada -> PCA -> ângulos. PCA e escala ajustados no treino (ou em tudo com pca_fit_all)."""
    if n_train is None or n_test is None:
        n_train, n_test = default_split_sizes(raw.labels, test_fraction)
    train, test = balanced_split(raw, n_train, n_test, seed)

    pca = fit_pca(raw.features if pca_fit_all else train.features, qubits)
    scaler = AngleScaler.fit(transform_pca(pca, train.features), angle_range)
    metadata = {
        **(metadata or {}),
        "qubits": qubits,
        "seed": seed,
        "pca_fit_all": pca_fit_all,
        "pca": pca.to_dict(),
        "scaler": scaler.to_dict(),
        "indices": {"train": train.metadata["indices"], "test": test.metadata["indices"]},
    }
    test_features = scaler.transform(transform_pca(pca, test.features)) if len(test) else np.zeros((0, qubits))
    return (Dataset(scaler.transform(transform_pca(pca, train.features)), train.labels, metadata),
            Dataset(test_features, test.labels, metadata),
            metadata)


def preprocess_corpus(corpus: list, qubits: int, image_size: tuple = config.IMAGE_SIZE_DEFAULT,
                      angle_range: tuple = config.ANGLE_RANGE_DEFAULT, seed: int = config.SEED_DEFAULT,
                      n_train: int = None, n_test: int = None, test_fraction: float = config.TEST_FRACTION_DEFAULT,
                      pca_fit_all: bool = False, schedule: WidthSchedule = WidthSchedule(),
                      max_workers: int = None) -> tuple:
    """Corpus -> imagens -> (treino, teste, metadados) por `reduce_dataset`."""
    if not corpus:
        raise ArgumentError("Corpus vazio")
    names = [name for name, _, _ in corpus]
    payloads = [data for _, data, _ in corpus]
    labels = np.array([label for _, _, label in corpus], dtype=int)
    sizes = [tuple(image_size)] * len(payloads)
    schedules = [schedule] * len(payloads)
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(image_features, payloads, sizes, schedules))
    else:
        rows = [image_features(*args) for args in zip(payloads, sizes, schedules)]

    train, test, metadata = reduce_dataset(
        Dataset(np.array(rows), labels), qubits, angle_range=angle_range, seed=seed, n_train=n_train,
        n_test=n_test, test_fraction=test_fraction, pca_fit_all=pca_fit_all,
        metadata={"source": "corpus", "image_size": list(image_size), "schedule": schedule.to_dict()})
    metadata["files"] = {split: [names[i] for i in metadata["indices"][split]] for split in ("train", "test")}
    return train, test, metadata


def feature_columns(dims: int) -> list:
    return [f"x{k}" for k in range(dims)]


def save_dataset(path: str, train: Dataset, test: Dataset, metadata: dict = None):
    """CSV (features, label, split) + sidecar JSON com os metadados do pipeline."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    dims = train.features.shape[1]
    frames = []
    for split, data in (("train", train), ("test", test)):
        frame = pd.DataFrame(data.features.reshape(-1, dims), columns=feature_columns(dims))
        frame[config.DATASET_LABEL_COLUMN] = data.labels
        frame[config.DATASET_SPLIT_COLUMN] = split
        frames.append(frame)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False, float_format="%.17g")
    sidecar = os.path.splitext(path)[0] + config.DATASET_SIDECAR_SUFFIX
    with open(sidecar, "w") as f:
        json.dump(metadata if metadata is not None else train.metadata, f, indent=2, sort_keys=True)


def load_dataset(path: str) -> tuple:
    """Inverso de save_dataset: (treino, teste, metadados)."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise ArgumentError(f"Dataset não encontrado: '{path}'")
    sidecar = os.path.splitext(path)[0] + config.DATASET_SIDECAR_SUFFIX
    metadata = {}
    if os.path.exists(sidecar):
        with open(sidecar) as f:
            metadata = json.load(f)
    columns = [c for c in frame.columns if c not in (config.DATASET_LABEL_COLUMN, config.DATASET_SPLIT_COLUMN)]
    splits = []
    for split in ("train", "test"):
        part = frame[frame[config.DATASET_SPLIT_COLUMN] == split]
        splits.append(Dataset(part[columns].to_numpy(dtype=float).reshape(-1, len(columns)),
                              part[config.DATASET_LABEL_COLUMN].to_numpy(dtype=int), metadata))
    return splits[0], splits[1], metadata
