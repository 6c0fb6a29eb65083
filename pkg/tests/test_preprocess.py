# tests/test_preprocess.py
import math

import numpy as np
import pandas as pd
import pytest

from utils.errors import ArgumentError
from utils.preprocess import (NEGATIVE_LABEL, POSITIVE_LABEL, AngleScaler, Dataset, GrayscaleImage, WidthSchedule,
                              balanced_split, bytes_to_image, default_split_sizes, fit_pca, generate_synthetic,
                              image_features, inverse_transform_pca, load_binary_corpus, load_dataset,
                              preprocess_corpus, reduce_dataset, resize, save_dataset, scale_to_angles,
                              transform_pca)


def write_corpus(directory, rng, count_per_class=10, sizes=(300, 5000)):
    directory.mkdir(parents=True, exist_ok=True)
    rows = []
    for k in range(2 * count_per_class):
        name = f"amostra_{k:03d}.bin"
        size = int(rng.integers(*sizes))
        (directory / name).write_bytes(rng.integers(0, 256, size=size, dtype=np.uint8).tobytes())
        rows.append({"filename": name, "label": k % 2})
    labels = directory.parent / "labels.csv"
    pd.DataFrame(rows).to_csv(labels, index=False)
    return str(directory), str(labels)


class TestImages:
    def test_width_schedule_lookup(self):
        schedule = WidthSchedule()
        assert schedule.width_for(1) == 32
        assert schedule.width_for(10 * 1024) == 32
        assert schedule.width_for(10 * 1024 + 1) == 64
        assert schedule.width_for(10 ** 9) == 1024

    def test_schedule_must_increase(self):
        with pytest.raises(ArgumentError):
            WidthSchedule(breakpoints=((100, 8), (50, 16)))

    def test_exact_row(self):
        img = bytes_to_image(bytes(range(32)))
        assert (img.width, img.height) == (32, 1)
        np.testing.assert_array_equal(img.pixels[0], np.arange(32))

    def test_partial_last_row_is_zero_padded(self):
        data = bytes([7] * 33)
        img = bytes_to_image(data)
        assert (img.width, img.height) == (32, 2)
        assert img.pixels[1, 0] == 7
        assert not img.pixels[1, 1:].any()

    def test_empty_input(self):
        with pytest.raises(ArgumentError):
            bytes_to_image(b"")

    def test_resize_identity(self, rng):
        img = GrayscaleImage(rng.integers(0, 256, size=(64, 64), dtype=np.uint8))
        np.testing.assert_array_equal(resize(img, (64, 64)).pixels, img.pixels)

    def test_resize_halves_constant_blocks(self, rng):
        blocks = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        img = GrayscaleImage(np.kron(blocks, np.ones((2, 2), dtype=np.uint8)))
        np.testing.assert_array_equal(resize(img, (64, 64)).pixels, blocks)

    def test_resize_keeps_aspect_ratio_and_pads(self):
        img = GrayscaleImage(np.full((64, 32), 200, dtype=np.uint8))
        out = resize(img, (64, 64))
        assert out.pixels.shape == (64, 64)
        assert (out.pixels[:, :32] == 200).all()
        assert not out.pixels[:, 32:].any()

    def test_image_features_are_normalized(self):
        features = image_features(bytes([255] * 4096))
        assert features.shape == (4096,)
        assert features.max() == 1.0 and features.min() >= 0.0


class TestPCA:
    def test_full_rank_reconstruction(self, rng):
        X = rng.normal(size=(20, 5))
        model = fit_pca(X, 5)
        np.testing.assert_allclose(inverse_transform_pca(model, transform_pca(model, X)), X, atol=1e-10)

    def test_line_data_concentrates_variance(self, rng):
        t = rng.normal(size=50)
        X = np.outer(t, [1.0, 2.0, -2.0]) + 5.0
        model = fit_pca(X, 2)
        assert model.explained_variance[0] > 1e6 * max(model.explained_variance[1], 1e-30)
        np.testing.assert_allclose(np.abs(model.components[0]), np.array([1.0, 2.0, 2.0]) / 3.0, atol=1e-10)

    def test_matches_covariance_eigenvectors_up_to_sign(self, rng):
        X = rng.normal(size=(40, 6)) @ rng.normal(size=(6, 6))
        model = fit_pca(X, 3)
        eigenvalues, eigenvectors = np.linalg.eigh(np.cov(X, rowvar=False))
        order = np.argsort(eigenvalues)[::-1][:3]
        np.testing.assert_allclose(model.explained_variance, eigenvalues[order], rtol=1e-8)
        for component, reference in zip(model.components, eigenvectors[:, order].T):
            assert abs(component @ reference) == pytest.approx(1.0, abs=1e-8)

    def test_sign_convention(self, rng):
        model = fit_pca(rng.normal(size=(30, 4)), 3)
        for component in model.components:
            assert component[np.argmax(np.abs(component))] > 0
        np.testing.assert_allclose(model.components @ model.components.T, np.eye(3), atol=1e-10)

    @pytest.mark.parametrize("k", [0, 6])
    def test_invalid_dimension(self, rng, k):
        with pytest.raises(ArgumentError):
            fit_pca(rng.normal(size=(5, 8)), k)


class TestAngles:
    def test_scale_to_angles(self):
        np.testing.assert_allclose(scale_to_angles(np.array([[0.0], [5.0], [10.0]])),
                                   [[0.0], [math.pi], [2 * math.pi]])

    def test_constant_column_goes_to_midpoint(self):
        out = scale_to_angles(np.array([[3.0, 1.0], [3.0, 2.0]]), (0.0, 2.0))
        np.testing.assert_allclose(out[:, 0], [1.0, 1.0])

    def test_unseen_values_are_clipped(self):
        scaler = AngleScaler.fit(np.array([[0.0], [1.0]]), (0.0, math.pi))
        np.testing.assert_allclose(scaler.transform(np.array([[-1.0], [2.0]])), [[0.0], [math.pi]])

    def test_invalid_range(self):
        with pytest.raises(ArgumentError):
            AngleScaler.fit(np.zeros((2, 1)), (1.0, 1.0))


class TestSplits:
    def test_balanced_and_disjoint(self):
        data = generate_synthetic(40, 3, 2.0, seed=5)
        train, test = balanced_split(data, 20, 10, seed=5)
        assert np.sum(train.labels == POSITIVE_LABEL) == 10
        assert np.sum(test.labels == NEGATIVE_LABEL) == 5
        assert not set(train.metadata["indices"]) & set(test.metadata["indices"])

    def test_split_is_reproducible(self):
        data = generate_synthetic(40, 3, 2.0, seed=5)
        a, _ = balanced_split(data, 20, 10, seed=9)
        b, _ = balanced_split(data, 20, 10, seed=9)
        assert a.metadata["indices"] == b.metadata["indices"]

    @pytest.mark.parametrize("n_train,n_test", [(21, 10), (20, 3), (0, 2), (40, 10)])
    def test_invalid_sizes(self, n_train, n_test):
        with pytest.raises(ArgumentError):
            balanced_split(generate_synthetic(40, 3, 2.0), n_train, n_test)

    def test_default_split_sizes(self):
        labels = np.array([1] * 13 + [-1] * 10)
        assert default_split_sizes(labels, 0.2) == (16, 4)

    def test_synthetic_is_deterministic(self):
        a = generate_synthetic(20, 4, 3.0, seed=2)
        b = generate_synthetic(20, 4, 3.0, seed=2)
        np.testing.assert_array_equal(a.features, b.features)
        assert np.sum(a.labels == POSITIVE_LABEL) == 10

    def test_reduce_dataset(self):
        raw = generate_synthetic(24, 5, 3.0, seed=2)
        train, test, metadata = reduce_dataset(raw, 2, angle_range=(0.0, math.pi), seed=2, metadata={"source": "x"})
        assert (len(train), len(test)) == default_split_sizes(raw.labels)
        assert train.features.shape == (20, 2) and test.features.shape == (4, 2)
        assert train.features.min() == pytest.approx(0.0) and train.features.max() == pytest.approx(math.pi)
        assert metadata["source"] == "x" and metadata["qubits"] == 2
        assert not set(metadata["indices"]["train"]) & set(metadata["indices"]["test"])
        split_train, _ = balanced_split(raw, 20, 4, seed=2)
        pca = fit_pca(split_train.features, 2)
        reduced = transform_pca(pca, split_train.features)
        expected = AngleScaler.fit(reduced, (0.0, math.pi)).transform(reduced)
        np.testing.assert_array_equal(train.features, expected)

    def test_reduce_dataset_without_test_split(self):
        train, test, _ = reduce_dataset(generate_synthetic(10, 3, 3.0, seed=1), 2, seed=1, n_train=10, n_test=0)
        assert len(train) == 10
        assert test.features.shape == (0, 2)

    def test_dataset_rejects_bad_labels(self):
        with pytest.raises(ArgumentError):
            Dataset(np.zeros((2, 2)), [1, 0])


class TestCorpus:
    def test_load_corpus(self, tmp_path, rng):
        input_dir, labels = write_corpus(tmp_path / "bins", rng, count_per_class=3)
        corpus = load_binary_corpus(input_dir, labels)
        assert len(corpus) == 6
        assert [label for _, _, label in corpus[:2]] == [NEGATIVE_LABEL, POSITIVE_LABEL]

    def test_missing_file(self, tmp_path, rng):
        input_dir, labels = write_corpus(tmp_path / "bins", rng, count_per_class=2)
        (tmp_path / "bins" / "amostra_000.bin").unlink()
        with pytest.raises(ArgumentError):
            load_binary_corpus(input_dir, labels)

    def test_invalid_label(self, tmp_path, rng):
        input_dir, labels = write_corpus(tmp_path / "bins", rng, count_per_class=2)
        frame = pd.read_csv(labels)
        frame.loc[0, "label"] = 7
        frame.to_csv(labels, index=False)
        with pytest.raises(ArgumentError):
            load_binary_corpus(input_dir, labels)

    def test_pipeline_output(self, tmp_path, rng):
        corpus = load_binary_corpus(*write_corpus(tmp_path / "bins", rng))
        train, test, metadata = preprocess_corpus(corpus, 3, image_size=(16, 16), angle_range=(0.0, math.pi), seed=4)
        assert (len(train), len(test)) == (16, 4)
        assert train.features.shape == (16, 3)
        assert train.features.min() >= 0.0 and train.features.max() <= math.pi
        assert test.features.min() >= 0.0 and test.features.max() <= math.pi
        assert len(metadata["files"]["train"]) == 16

    def test_parallel_conversion_matches_serial(self, tmp_path, rng):
        corpus = load_binary_corpus(*write_corpus(tmp_path / "bins", rng, count_per_class=4))
        serial, _, _ = preprocess_corpus(corpus, 2, image_size=(16, 16), seed=1)
        parallel, _, _ = preprocess_corpus(corpus, 2, image_size=(16, 16), seed=1, max_workers=2)
        np.testing.assert_array_equal(serial.features, parallel.features)


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        data = generate_synthetic(20, 3, 2.0, seed=8)
        train, test = balanced_split(data, 12, 8, seed=8)
        path = tmp_path / "dados" / "ds.csv"
        save_dataset(str(path), train, test, {"origem": "teste"})
        loaded_train, loaded_test, metadata = load_dataset(str(path))
        np.testing.assert_array_equal(loaded_train.features, train.features)
        np.testing.assert_array_equal(loaded_test.labels, test.labels)
        assert metadata == {"origem": "teste"}

    def test_same_inputs_write_identical_bytes(self, tmp_path, rng):
        corpus = load_binary_corpus(*write_corpus(tmp_path / "bins", rng))
        for name in ("a.csv", "b.csv"):
            train, test, metadata = preprocess_corpus(corpus, 4, image_size=(16, 16), seed=6)
            save_dataset(str(tmp_path / name), train, test, metadata)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_missing_dataset(self, tmp_path):
        with pytest.raises(ArgumentError):
            load_dataset(str(tmp_path / "nada.csv"))
