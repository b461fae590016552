import pytest

from forageq.config import (
    ConfigError,
    RunConfig,
    dumps,
    load_config,
    loads,
    save_config,
    with_overrides,
)


class TestDefaults:
    def test_empty_text_gives_reference_setup(self):
        cfg = loads("")
        assert cfg.grid_width == 100 and cfg.grid_height == 100
        assert cfg.density == 0.1
        assert cfg.n_allies == 4 and cfg.n_adversaries == 5
        assert cfg.radius == 10
        assert cfg.lr == 0.01 and cfg.gamma == 0.8
        assert cfg.eps0 == 1.0 and cfg.eps_decay == 0.995
        assert cfg.eps_min == 0.1
        assert cfg.n_lifetimes == 10 and cfg.episodes_per_lifetime == 40
        assert cfg.total_training_episodes == 400

    def test_comments_and_blanks_ignored(self):
        cfg = loads("# a comment\n\nseed = 9  # trailing\n")
        assert cfg.seed == 9

    def test_marl_headcount_defaults_to_team_size(self):
        assert loads("").marl_k == 5
        assert loads("marl_agents = 3").marl_k == 3
        assert loads("n_allies = 2").marl_k == 3


class TestParsing:
    def test_all_value_kinds(self):
        cfg = loads("gamma = 0.9\nseed = 4\nmeasure_timing = false\n"
                    "conv_channels = 8,16\nhidden =\n")
        assert cfg.gamma == 0.9
        assert cfg.seed == 4
        assert cfg.measure_timing is False
        assert cfg.conv_channels == (8, 16)
        assert cfg.hidden == ()

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="rho"):
            loads("rho = 0.2")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="seed"):
            loads("seed = 1\nseed = 2")

    def test_malformed_value_names_key(self):
        with pytest.raises(ConfigError, match="batch_size"):
            loads("batch_size = lots")

    def test_non_assignment_line_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            loads("just some words")


class TestValidation:
    def test_out_of_range_density_names_key(self):
        with pytest.raises(ConfigError, match="density"):
            loads("density = 1.5")

    def test_epsilon_floor_above_start(self):
        with pytest.raises(ConfigError, match="eps_min"):
            loads("eps0 = 0.05")

    def test_batch_must_fit_replay(self):
        with pytest.raises(ConfigError, match="batch_size"):
            loads("replay_capacity = 16\nbatch_size = 32")

    def test_counts_must_be_positive(self):
        for key in ("n_lifetimes", "episodes_per_lifetime",
                    "timesteps", "n_eval"):
            with pytest.raises(ConfigError, match=key):
                loads(f"{key} = 0")

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError, match="seed"):
            loads("seed = -1")

    def test_even_kernel_rejected(self):
        with pytest.raises(ConfigError, match="kernel"):
            loads("kernel = 4")


class TestRoundTrip:
    def test_dumps_loads_identity(self):
        cfg = RunConfig(grid_width=20, grid_height=20, density=0.1,
                        n_allies=2, n_adversaries=3, seed=17,
                        conv_channels=(), hidden=(32,),
                        measure_timing=False, eps_decay=0.97)
        assert loads(dumps(cfg)) == cfg

    def test_default_round_trip(self):
        assert loads(dumps(RunConfig())) == RunConfig()

    def test_file_round_trip(self, tmp_path):
        cfg = RunConfig(seed=5, timesteps=25)
        path = tmp_path / "run.cfg"
        save_config(cfg, path)
        assert load_config(path) == cfg

    def test_missing_file_named(self, tmp_path):
        with pytest.raises(ConfigError, match="nope.cfg"):
            load_config(tmp_path / "nope.cfg")


class TestDerivedViews:
    def test_env_config_counts(self):
        cfg = RunConfig(n_allies=2, n_adversaries=3)
        env = cfg.env_config()
        assert (env.n_leaders, env.n_allies, env.n_adversaries) == (1, 2, 3)
        lonely = cfg.env_config(n_allies=0)
        assert lonely.n_allies == 0

    def test_network_spec_single(self):
        spec = RunConfig().network_spec()
        assert spec.in_channels == 3
        assert spec.in_height == spec.in_width == 21
        assert spec.conv_channels == (16, 32)
        assert spec.hidden == (128,)
        assert spec.n_actions == 4

    def test_network_spec_joint(self):
        spec = RunConfig(n_allies=2).network_spec(n_controlled=3)
        assert spec.in_channels == 9
        assert spec.n_actions == 12

    def test_dqn_and_reward_params(self):
        cfg = RunConfig(lr=0.02, gamma=0.7, w_e=0.3)
        assert cfg.dqn_params().lr == 0.02
        assert cfg.dqn_params().gamma == 0.7
        assert cfg.reward_params().w_e == 0.3

    def test_with_overrides_revalidates(self):
        cfg = RunConfig()
        assert with_overrides(cfg, seed=3).seed == 3
        with pytest.raises(ConfigError):
            with_overrides(cfg, density=2.0)
