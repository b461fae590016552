import numpy as np
import pytest
from scipy.signal import correlate2d

from forageq import nn
from forageq.nn import NetworkSpec

from helpers import analytic_grads, max_rel_error, numeric_grads


def tiny_spec(**kw):
    defaults = dict(in_channels=1, in_height=4, in_width=4,
                    conv_channels=(2,), hidden=(5,), n_actions=3)
    defaults.update(kw)
    return NetworkSpec(**defaults)


class TestSpecValidation:
    def test_rejects_even_kernel(self):
        with pytest.raises(ValueError):
            NetworkSpec(1, 4, 4, kernel=2)

    def test_rejects_empty_output(self):
        with pytest.raises(ValueError):
            NetworkSpec(1, 4, 4, n_actions=0)

    def test_flat_size_with_and_without_convs(self):
        assert tiny_spec().flat_size == 2 * 4 * 4
        assert tiny_spec(conv_channels=()).flat_size == 1 * 4 * 4

    def test_layer_dims_default_architecture(self):
        spec = NetworkSpec(3, 21, 21)
        dims = spec.layer_dims()
        assert [d[0] for d in dims] == ["conv0", "conv1", "dense0", "dense1"]
        assert dims[0][1] == (16, 3, 3, 3)
        assert dims[1][1] == (32, 16, 3, 3)
        assert dims[2][1] == (128, 32 * 21 * 21)
        assert dims[3][1] == (4, 128)


class TestInit:
    def test_shapes_dtypes_and_zero_biases(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        for name, w_shape, b_shape in spec.layer_dims():
            assert params[f"{name}.w"].shape == w_shape
            assert params[f"{name}.b"].shape == b_shape
            assert params[f"{name}.w"].dtype == np.float32
            assert np.all(params[f"{name}.b"] == 0)

    def test_weights_respect_fan_based_limit(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(1))
        w = params["conv0.w"]
        limit = np.sqrt(6.0 / (1 * 9 + 2 * 9))
        assert np.all(np.abs(w) <= limit)
        assert np.std(w) > 0

    def test_seeded_init_is_reproducible(self):
        spec = tiny_spec()
        p1 = nn.init_params(spec, np.random.default_rng(42))
        p2 = nn.init_params(spec, np.random.default_rng(42))
        for k in p1:
            assert np.array_equal(p1[k], p2[k])


class TestForward:
    def test_output_shape(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        x = np.random.default_rng(1).random((6, 1, 4, 4), dtype=np.float32)
        assert nn.forward(spec, params, x).shape == (6, 3)

    def test_dense_only_network(self):
        spec = tiny_spec(conv_channels=())
        params = nn.init_params(spec, np.random.default_rng(0))
        x = np.random.default_rng(1).random((2, 1, 4, 4), dtype=np.float32)
        assert nn.forward(spec, params, x).shape == (2, 3)

    def test_rejects_unbatched_input(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        with pytest.raises(ValueError):
            nn.forward(spec, params, np.zeros((1, 4, 4), dtype=np.float32))

    def test_float32_stays_float32(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        x = np.zeros((1, 1, 4, 4), dtype=np.float32)
        assert nn.forward(spec, params, x).dtype == np.float32

    def test_batch_matches_singles(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(3))
        x = np.random.default_rng(4).random((5, 1, 4, 4), dtype=np.float32)
        whole = nn.forward(spec, params, x)
        singles = np.vstack([nn.forward(spec, params, x[i:i + 1])
                             for i in range(5)])
        assert np.allclose(whole, singles, atol=1e-6)

    def test_conv_layer_matches_scipy(self):
        # single conv, no ReLU clipping (inputs positive, bias large)
        spec = NetworkSpec(2, 6, 5, conv_channels=(3,), hidden=(),
                           n_actions=1)
        rng = np.random.default_rng(7)
        params = nn.init_params(spec, rng, dtype=np.float64)
        x = rng.random((1, 2, 6, 5))
        out, cache = nn.forward(spec, params, x, want_cache=True)
        pre = cache["conv0.pre"]
        w, b = params["conv0.w"], params["conv0.b"]
        for o in range(3):
            want = sum(correlate2d(x[0, c], w[o, c], mode="same",
                                   boundary="fill") for c in range(2)) + b[o]
            assert np.allclose(pre[0, o], want, atol=1e-10)


class TestBackward:
    def test_gradients_match_finite_differences(self):
        spec = NetworkSpec(1, 4, 4, conv_channels=(2,), hidden=(5,),
                           n_actions=3)
        rng = np.random.default_rng(11)
        params = nn.init_params(spec, rng, dtype=np.float64)
        x = rng.uniform(0.1, 1.0, size=(2, 1, 4, 4))
        mix = rng.normal(size=(2, 3))
        rel = max_rel_error(analytic_grads(spec, params, x, mix),
                            numeric_grads(spec, params, x, mix))
        assert rel < 1e-6

    def test_gradients_dense_only(self):
        spec = NetworkSpec(1, 3, 3, conv_channels=(), hidden=(4,),
                           n_actions=2)
        rng = np.random.default_rng(12)
        params = nn.init_params(spec, rng, dtype=np.float64)
        x = rng.uniform(0.1, 1.0, size=(3, 1, 3, 3))
        mix = rng.normal(size=(3, 2))
        rel = max_rel_error(analytic_grads(spec, params, x, mix),
                            numeric_grads(spec, params, x, mix))
        assert rel < 1e-6

    def test_gradient_shapes_match_params(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        x = np.random.default_rng(1).random((2, 1, 4, 4), dtype=np.float32)
        out, cache = nn.forward(spec, params, x, want_cache=True)
        grads = nn.backward(spec, params, cache, np.ones_like(out))
        assert set(grads) == set(params)
        for k in params:
            assert grads[k].shape == params[k].shape


class TestSgdStep:
    def test_applies_update_and_leaves_inputs_alone(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        before = nn.copy_params(params)
        grads = {k: np.ones_like(v) for k, v in params.items()}
        stepped = nn.sgd_step(params, grads, lr=0.5)
        for k in params:
            assert np.allclose(stepped[k], before[k] - 0.5)
            assert np.array_equal(params[k], before[k])
            assert stepped[k].dtype == params[k].dtype

    def test_zero_lr_is_identity(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        grads = {k: np.ones_like(v) for k, v in params.items()}
        stepped = nn.sgd_step(params, grads, lr=0.0)
        for k in params:
            assert np.array_equal(stepped[k], params[k])


def test_copy_params_is_deep():
    spec = tiny_spec()
    params = nn.init_params(spec, np.random.default_rng(0))
    dup = nn.copy_params(params)
    dup["conv0.w"][0, 0, 0, 0] += 1.0
    assert params["conv0.w"][0, 0, 0, 0] != dup["conv0.w"][0, 0, 0, 0]


def test_cast_params_roundtrip_dtype():
    spec = tiny_spec()
    params = nn.init_params(spec, np.random.default_rng(0))
    wide = nn.cast_params(params, np.float64)
    assert all(v.dtype == np.float64 for v in wide.values())
    assert all(v.dtype == np.float32 for v in params.values())


class TestCheckpointFormat:
    def test_round_trip_is_bit_identical(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        back = nn.deserialize_params(nn.serialize_params(params))
        assert list(back) == list(params)
        for k in params:
            assert back[k].dtype == np.float32
            assert np.array_equal(back[k].view(np.uint8),
                                  params[k].view(np.uint8))

    def test_empty_set_round_trips(self):
        data = nn.serialize_params({})
        assert data[:4] == b"FSQN"
        assert nn.deserialize_params(data) == {}

    def test_header_layout(self):
        data = nn.serialize_params({"w": np.zeros((2, 3), dtype=np.float32)})
        assert data[:4] == b"FSQN"
        assert int.from_bytes(data[4:8], "little") == nn.CHECKPOINT_VERSION
        assert int.from_bytes(data[8:12], "little") == 1       # entry count
        assert int.from_bytes(data[12:16], "little") == 1      # name length
        assert data[16:17] == b"w"
        assert int.from_bytes(data[17:21], "little") == 2      # rank
        assert int.from_bytes(data[21:25], "little") == 2
        assert int.from_bytes(data[25:29], "little") == 3
        assert len(data) == 29 + 4 * 6

    def test_values_little_endian_row_major(self):
        arr = np.arange(6, dtype=np.float32).reshape(2, 3)
        data = nn.serialize_params({"w": arr})
        tail = np.frombuffer(data[-24:], dtype="<f4")
        assert np.array_equal(tail, [0, 1, 2, 3, 4, 5])

    def test_rejects_bad_magic(self):
        data = b"XXXX" + nn.serialize_params({})[4:]
        with pytest.raises(nn.CheckpointError):
            nn.deserialize_params(data)

    def test_rejects_truncation(self):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(0))
        data = nn.serialize_params(params)
        with pytest.raises(nn.CheckpointError):
            nn.deserialize_params(data[:-3])

    def test_rejects_trailing_garbage(self):
        data = nn.serialize_params({}) + b"\x00"
        with pytest.raises(nn.CheckpointError):
            nn.deserialize_params(data)

    def test_file_round_trip(self, tmp_path):
        spec = tiny_spec()
        params = nn.init_params(spec, np.random.default_rng(3))
        path = tmp_path / "model.fsqn"
        nn.save_params(path, params)
        back = nn.load_params(path)
        for k in params:
            assert np.array_equal(back[k], params[k])
