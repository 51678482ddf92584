import os

import pytest

from specalloc.config import ConfigError, default_config, load_config, parse_config

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def test_defaults():
    cfg = default_config()
    assert cfg.region.width_m == 1000.0
    assert cfg.oracle.beta_db == 10.0
    assert cfg.sampler.n_pus == (10, 20)
    assert cfg.conservative is None


def test_checked_in_profiles_parse():
    default = load_config(os.path.join(CONFIG_DIR, "default.toml"))
    assert default.sampler.pu_power_dbm == (-30.0, 0.0)
    assert default.propagation.alpha == 3.3
    benign = load_config(os.path.join(CONFIG_DIR, "benign.toml"))
    assert benign.sampler.snr_margin_db == 10.0
    assert benign.oracle.beta_db == 3.0


def test_sections_and_types():
    cfg = parse_config(
        """
        # comment
        [oracle]
        beta_db = 6.0          # trailing comment
        noise_dbm = -120.0
        [sampler]
        n_pus = [4, 6]
        seed = 17
        [run]
        jobs = 3
        """
    )
    assert cfg.oracle.beta_db == 6.0
    assert cfg.sampler.n_pus == (4, 6)
    assert cfg.sampler.seed == 17
    assert cfg.jobs == 3


def test_run_seed_reseeds_sampler_and_propagation():
    cfg = parse_config("[run]\nseed = 99\n")
    assert cfg.sampler.seed == 99
    assert cfg.propagation.seed == 99


def test_conservative_section_enables():
    cfg = parse_config("[conservative]\nn_probes = 8\n")
    assert cfg.conservative is not None
    assert cfg.conservative.n_probes == 8


def test_unknown_key_reports_path():
    with pytest.raises(ConfigError, match=r"oracle\.bogus"):
        parse_config("[oracle]\nbogus = 1\n")


def test_unknown_section():
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config("[nope]\nx = 1\n")


def test_bad_value_reports_path():
    with pytest.raises(ConfigError, match=r"oracle\.beta_db"):
        parse_config("[oracle]\nbeta_db = fast\n")


def test_invalid_field_value_reports_section():
    with pytest.raises(ConfigError, match=r"\[oracle\]"):
        parse_config("[oracle]\nbeta_db = -1.0\n")
