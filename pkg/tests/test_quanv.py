"""Patch extraction, quanvolutional forward pass, and the demo classifier."""

import numpy as np
import pytest

from unitary_forge.optim import TrainConfig
from unitary_forge.quanv import (
    ImageBatch,
    QuanvSpec,
    extract_patches,
    images_to_csv,
    load_image_csv,
    quanv_forward,
    random_quanv_spec,
    scale_pixels,
    synthetic_two_class,
    train_quanv_demo,
)

from oracles import central_diff_grad, encode_rows, taylor_expm, z_values


def small_spec(seed=0, **overrides):
    settings = dict(in_channels=4, out_channels=2, channel_block=2)
    settings.update(overrides)
    return random_quanv_spec(seed, **settings)


def random_images(batch, channels, height, width, seed):
    rng = np.random.default_rng(seed)
    return ImageBatch(rng.uniform(-np.pi / 2, np.pi / 2, (batch, channels, height, width)))


class TestImageBatch:
    def test_rejects_out_of_range_pixels(self):
        with pytest.raises(ValueError, match="rescale"):
            ImageBatch(np.full((1, 1, 2, 2), 3.0))

    def test_scale_pixels_maps_into_range(self):
        raw = np.array([[0.0, 128.0], [255.0, 64.0]])
        scaled = scale_pixels(raw)
        assert scaled.min() == pytest.approx(-np.pi / 2)
        assert scaled.max() == pytest.approx(np.pi / 2)

    def test_scale_pixels_constant_input(self):
        assert not scale_pixels(np.full((2, 2), 7.0)).any()


class TestExtractPatches:
    def test_kernel_equal_to_image_gives_one_patch(self):
        imgs = random_images(2, 3, 2, 2, seed=0)
        patches = extract_patches(imgs, kernel=2, stride=1)
        assert patches.shape == (2, 3, 1, 1, 2, 2)
        assert np.array_equal(patches[..., 0, 0, :, :], imgs.pixels)

    def test_three_by_three_gives_four_patches(self):
        imgs = random_images(1, 1, 3, 3, seed=1)
        patches = extract_patches(imgs, kernel=2, stride=1)
        assert patches.shape == (1, 1, 2, 2, 2, 2)

    def test_matches_naive_indexing(self):
        imgs = random_images(2, 2, 6, 5, seed=2)
        k, s = 2, 2
        patches = extract_patches(imgs, kernel=k, stride=s)
        hp = (6 - k) // s + 1
        wp = (5 - k) // s + 1
        assert patches.shape == (2, 2, hp, wp, k, k)
        for b in range(2):
            for c in range(2):
                for i in range(hp):
                    for j in range(wp):
                        want = imgs.pixels[b, c, i * s : i * s + k, j * s : j * s + k]
                        assert np.array_equal(patches[b, c, i, j], want)

    def test_kernel_too_large(self):
        imgs = random_images(1, 1, 2, 2, seed=3)
        with pytest.raises(ValueError, match="does not fit"):
            extract_patches(imgs, kernel=3, stride=1)


class TestQuanvSpec:
    def test_default_circuit_count(self):
        spec = random_quanv_spec(seed=0)
        assert spec.n_circuits == 32
        assert spec.n_blocks == 4
        assert all(t.size == 256 for t in spec.circuits)

    def test_kernel_qubit_consistency(self):
        with pytest.raises(ValueError, match="n_qubits"):
            QuanvSpec(kernel=3, circuits=())

    def test_block_must_divide_channels(self):
        with pytest.raises(ValueError, match="divide"):
            random_quanv_spec(seed=0, in_channels=6, channel_block=4)


class TestQuanvForward:
    def test_identity_circuits_on_constant_image(self):
        v = 0.9
        spec = small_spec()
        zeros = tuple(np.zeros(256) for _ in spec.circuits)
        spec = QuanvSpec(
            in_channels=4, out_channels=2, channel_block=2, circuits=zeros
        )
        imgs = ImageBatch(np.full((2, 4, 3, 3), v))
        out = quanv_forward(imgs, spec)
        assert out.shape == (2, 2, 2, 2)
        assert np.allclose(out, np.cos(v), atol=1e-12)

    def test_zero_image_is_location_independent(self):
        spec = small_spec(seed=4)
        imgs = ImageBatch(np.zeros((1, 4, 4, 4)))
        out = quanv_forward(imgs, spec)
        for o in range(out.shape[1]):
            assert np.ptp(out[0, o]) <= 1e-12

    def test_single_patch_matches_brute_force(self):
        spec = small_spec(seed=5)
        imgs = random_images(1, 4, 2, 2, seed=5)
        out = quanv_forward(imgs, spec)
        # independent route: block-mean angles -> kron encoding -> series
        # exponential -> explicit Z sums
        for o in range(spec.out_channels):
            vals = []
            for blk in range(spec.n_blocks):
                block_pixels = imgs.pixels[0, blk * 2 : blk * 2 + 2]
                angles = block_pixels.mean(axis=0).ravel()
                amps = encode_rows(angles[None, :])
                from unitary_forge.liegroup import assemble

                u = taylor_expm(assemble(spec.circuits[o * spec.n_blocks + blk]))
                evolved = amps @ u.T
                vals.append(z_values(evolved, 4).mean())
            assert out[0, o, 0, 0] == pytest.approx(float(np.mean(vals)), abs=1e-10)

    def test_output_bounded(self):
        spec = small_spec(seed=6)
        out = quanv_forward(random_images(2, 4, 5, 5, seed=6), spec)
        assert (out <= 1.0 + 1e-12).all() and (out >= -1.0 - 1e-12).all()

    def test_translation_consistency(self):
        spec = small_spec(seed=7)
        rng = np.random.default_rng(7)
        base = rng.uniform(-1.0, 1.0, (1, 4, 5, 5))
        shifted = np.roll(base, 1, axis=2)
        out_a = quanv_forward(ImageBatch(base), spec)
        out_b = quanv_forward(ImageBatch(shifted), spec)
        # rows of the shifted output overlap the original one cell down
        assert np.allclose(out_b[:, :, 1:, :], out_a[:, :, :-1, :], atol=1e-12)

    def test_channel_mismatch(self):
        spec = small_spec(seed=8)
        with pytest.raises(ValueError, match="channels"):
            quanv_forward(random_images(1, 6, 3, 3, seed=8), spec)


class TestTrainQuanvDemo:
    def test_untrained_accuracy_near_chance(self):
        imgs, labels = synthetic_two_class(40, seed=9)
        cfg = TrainConfig(epochs=1, batch_size=40, seed=9)
        report = train_quanv_demo(imgs, labels, cfg)
        assert abs(report.initial_accuracy - 0.5) <= 0.1

    def test_learns_separable_classes(self):
        imgs, labels = synthetic_two_class(32, seed=10, channels=4, height=4, width=4)
        spec = small_spec(seed=10)
        cfg = TrainConfig(epochs=40, batch_size=32, seed=10, learning_rate=0.05)
        report = train_quanv_demo(imgs, labels, cfg, spec=spec)
        assert max(report.accuracy_curve) >= 0.9
        assert len(report.accuracy_curve) == 40
        assert len(report.epoch_times) == 40

    def test_deterministic(self):
        imgs, labels = synthetic_two_class(16, seed=11, channels=4, height=4, width=4)
        spec = small_spec(seed=11)
        cfg = TrainConfig(epochs=3, batch_size=8, seed=11)
        a = train_quanv_demo(imgs, labels, cfg, spec=spec)
        b = train_quanv_demo(imgs, labels, cfg, spec=spec)
        assert a.loss_curve == b.loss_curve
        assert a.accuracy_curve == b.accuracy_curve

    def test_circuit_gradients_match_finite_differences(self):
        # joint loss as a function of one circuit's parameters
        imgs, labels = synthetic_two_class(6, seed=12, channels=4, height=2, width=2)
        spec = small_spec(seed=12)
        cfg = TrainConfig(epochs=1, batch_size=6, seed=12)

        import dataclasses

        from unitary_forge.quanv import _backward_circuits, _forward_cached, _softmax_cross_entropy

        rng = np.random.default_rng(12)
        w = 0.05 * rng.standard_normal((spec.out_channels, labels.max() + 1))

        def forward_loss(thetas):
            current = dataclasses.replace(spec, circuits=tuple(thetas))
            out, cache = _forward_cached(imgs, current)
            feats = out.reshape(imgs.batch, -1)
            logits = feats @ w
            loss, dlogits, _ = _softmax_cross_entropy(logits, labels)
            return loss, cache, dlogits @ w.T, current, out

        thetas0 = [t.copy() for t in spec.circuits]
        loss0, cache, d_feats, current, out = forward_loss(thetas0)
        d_out = d_feats.reshape(out.shape)
        grads = _backward_circuits(current, cache, d_out)

        probe = 1  # check one circuit end to end

        def f(theta):
            thetas = [t.copy() for t in thetas0]
            thetas[probe] = theta
            loss, *_ = forward_loss(thetas)
            return loss

        fd = central_diff_grad(f, thetas0[probe], h=1e-5)
        assert np.allclose(grads[probe], fd, rtol=1e-4, atol=1e-8)

    def test_label_shape_validation(self):
        imgs, labels = synthetic_two_class(4, seed=13, height=4, width=4)
        cfg = TrainConfig(epochs=1, batch_size=4, seed=13)
        with pytest.raises(ValueError, match="one integer per image"):
            train_quanv_demo(imgs, labels[:-1], cfg)


class TestCsvIngestion:
    def test_round_trip(self, tmp_path):
        imgs, labels = synthetic_two_class(6, seed=14, channels=2, height=3, width=3)
        path = tmp_path / "images.csv"
        images_to_csv(imgs, labels, path)
        loaded, got_labels = load_image_csv(path, channels=2, height=3, width=3, rescale=False)
        assert np.array_equal(got_labels, labels)
        assert np.allclose(loaded.pixels, imgs.pixels, atol=1e-12)

    def test_rescaling_on_load(self, tmp_path):
        path = tmp_path / "raw.csv"
        with open(path, "w") as fh:
            fh.write("0," + ",".join(str(v) for v in range(4)) + "\n")
            fh.write("1," + ",".join(str(v) for v in range(4, 8)) + "\n")
        loaded, labels = load_image_csv(path, channels=1, height=2, width=2)
        assert labels.tolist() == [0, 1]
        assert loaded.pixels.min() == pytest.approx(-np.pi / 2)
        assert loaded.pixels.max() == pytest.approx(np.pi / 2)
