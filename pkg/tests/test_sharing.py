import numpy as np
import pytest

from forageq import nn
from forageq.nn import NetworkSpec
from forageq.sharing import disseminate, mutate_params


def some_params():
    spec = NetworkSpec(1, 4, 4, conv_channels=(2,), hidden=(8,), n_actions=4)
    return nn.init_params(spec, np.random.default_rng(0))


class TestMutation:
    def test_zero_sigma_is_bit_identical(self):
        params = some_params()
        params["conv0.w"][0, 0, 0, 0] = np.float32(-0.0)  # signed-zero probe
        out = mutate_params(params, 0.0, np.random.default_rng(1))
        for k in params:
            assert out[k].dtype == params[k].dtype
            assert np.array_equal(
                out[k].view(np.uint8), params[k].view(np.uint8)), k

    def test_zero_sigma_returns_independent_copy(self):
        params = some_params()
        out = mutate_params(params, 0.0, np.random.default_rng(1))
        out["dense0.b"][0] += 1.0
        assert params["dense0.b"][0] == 0.0

    def test_originals_untouched_by_mutation(self):
        params = some_params()
        before = nn.copy_params(params)
        mutate_params(params, 0.5, np.random.default_rng(2))
        for k in params:
            assert np.array_equal(params[k], before[k])

    def test_noise_statistics(self):
        rng = np.random.default_rng(3)
        big = {"w": np.zeros(200_000, dtype=np.float32)}
        out = mutate_params(big, 0.01, rng)
        delta = out["w"].astype(np.float64)
        assert abs(delta.mean()) < 1e-4
        assert delta.std() == pytest.approx(0.01, rel=0.02)

    def test_preserves_shapes_and_dtype(self):
        params = some_params()
        out = mutate_params(params, 0.1, np.random.default_rng(4))
        for k in params:
            assert out[k].shape == params[k].shape
            assert out[k].dtype == params[k].dtype

    def test_rejects_negative_sigma(self):
        with pytest.raises(ValueError):
            mutate_params(some_params(), -0.1, np.random.default_rng(0))

    def test_seeded_mutation_reproducible(self):
        params = some_params()
        a = mutate_params(params, 0.01, np.random.default_rng(9))
        b = mutate_params(params, 0.01, np.random.default_rng(9))
        for k in a:
            assert np.array_equal(a[k], b[k])


class TestDissemination:
    def test_one_model_per_ally(self):
        out = disseminate(some_params(), 4, 0.01, np.random.default_rng(0))
        assert len(out) == 4

    def test_allies_get_different_noise(self):
        out = disseminate(some_params(), 3, 0.01, np.random.default_rng(0))
        assert not np.array_equal(out[0]["dense0.w"], out[1]["dense0.w"])
        assert not np.array_equal(out[1]["dense0.w"], out[2]["dense0.w"])

    def test_leader_params_unchanged(self):
        params = some_params()
        before = nn.copy_params(params)
        disseminate(params, 5, 0.2, np.random.default_rng(0))
        for k in params:
            assert np.array_equal(params[k], before[k])

    def test_zero_allies(self):
        assert disseminate(some_params(), 0, 0.01,
                           np.random.default_rng(0)) == []

    def test_rejects_negative_count(self):
        with pytest.raises(ValueError):
            disseminate(some_params(), -1, 0.01, np.random.default_rng(0))
