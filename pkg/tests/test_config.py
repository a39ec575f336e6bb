from pathlib import Path

import pytest  # type: ignore

from cholreg.core.estimators import EstimatorKind
from cholreg.utils.config import PRESETS, Config, SweepConfig
from cholreg.utils.logger import ConfigError, ValidationError
from cholreg.utils.validation import (
    validate_condition_numbers,
    validate_eta_values,
    validate_sample_counts,
    validate_seed,
    validate_sweep_config,
    validate_trials,
)


# Test fixtures
@pytest.fixture
def config_file(tmp_path):
    """Write a small sweep config file."""
    path = tmp_path / "sweep.cfg"
    path.write_text(
        "# reduced grid\n"
        "p = 30\n"
        "n = 10, 20   # two sample counts\n"
        "cond = 4, 64\n"
        "eta = 0.25\n"
        "estimators = oracle, RCF\n"
        "trials = 50\n"
        "seed = 42\n"
        "out = results/risk.csv\n"
        "\n"
        "deterministic = yes\n"
    )
    return path


# Test defaults and presets
def test_default_config_is_condition_grid():
    """Test the defaults reproduce the loss-versus-condition grid."""
    sweep = Config().to_sweep_config()
    assert sweep.p == 200
    assert sweep.n_values == (120,)
    assert sweep.cond_values == (4.0, 16.0, 64.0, 256.0, 1024.0)
    assert sweep.eta_values == (0.25, 0.4)
    assert sweep.estimators == (EstimatorKind.ORACLE, EstimatorKind.RCF,
                                EstimatorKind.LWLS)
    assert sweep.grid_size == 30
    assert sweep.workers == 1
    assert not sweep.deterministic


def test_presets():
    """Test each preset yields a valid grid."""
    assert set(PRESETS) == {"cond-sweep", "n-sweep", "eta-sweep"}
    by_n = Config(preset="n-sweep").to_sweep_config()
    assert by_n.n_values == (40, 60, 80, 100, 120, 140, 160, 180)
    assert by_n.cond_values == (256.0,)
    by_eta = Config(preset="eta-sweep").to_sweep_config()
    assert by_eta.eta_values == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)
    with pytest.raises(ConfigError, match="Unknown preset"):
        Config(preset="nope")


# Test config files
def test_load_config_file(config_file):
    """Test every key is parsed from a file."""
    sweep = Config(config_file=config_file).to_sweep_config()
    assert sweep == SweepConfig(
        p=30,
        n_values=(10, 20),
        cond_values=(4.0, 64.0),
        eta_values=(0.25,),
        estimators=(EstimatorKind.ORACLE, EstimatorKind.RCF),
        trials=50,
        seed=42,
        out=Path("results/risk.csv"),
        workers=1,
        deterministic=True,
    )


def test_file_overrides_preset(config_file):
    """Test a file wins over a preset."""
    sweep = Config(config_file=config_file, preset="n-sweep").to_sweep_config()
    assert sweep.n_values == (10, 20)
    assert sweep.cond_values == (4.0, 64.0)


def test_config_file_errors(tmp_path):
    """Test malformed files report their location."""
    path = tmp_path / "bad.cfg"
    path.write_text("p = 30\nthis line has no separator\n")
    with pytest.raises(ConfigError, match="bad.cfg:2"):
        Config(config_file=path)

    path.write_text("p = thirty\n")
    with pytest.raises(ConfigError, match="bad.cfg:1.*'p'"):
        Config(config_file=path)

    path.write_text("colour = blue\n")
    with pytest.raises(ConfigError, match="Unknown configuration key"):
        Config(config_file=path)

    with pytest.raises(ConfigError, match="Cannot read"):
        Config(config_file=tmp_path / "missing.cfg")


# Test overrides
def test_apply_overrides():
    """Test command-line values replace earlier sources; None is skipped."""
    config = Config()
    config.apply_overrides({"p": "40", "n": "10,20,30", "estimators": "LWLS",
                            "seed": None, "workers": "3"})
    sweep = config.to_sweep_config()
    assert sweep.p == 40
    assert sweep.n_values == (10, 20, 30)
    assert sweep.estimators == (EstimatorKind.LWLS,)
    assert sweep.seed == 1
    assert sweep.workers == 3
    assert config.get_config("missing", "fallback") == "fallback"


def test_invalid_values_become_config_errors():
    """Test validation failures surface as ConfigError."""
    config = Config()
    config.apply_overrides({"p": "50", "n": "60"})
    with pytest.raises(ConfigError, match="1 <= n < p"):
        config.to_sweep_config()

    with pytest.raises(ConfigError, match="Unknown estimator"):
        Config().set_config("estimators", "Oracle, Shrinkage")

    with pytest.raises(ConfigError, match="not a boolean"):
        Config().set_config("deterministic", "maybe")


# Test validators
def test_validators():
    """Test individual validators."""
    assert validate_sample_counts(10, [1, 9])
    with pytest.raises(ValidationError):
        validate_sample_counts(10, [10])
    with pytest.raises(ValidationError):
        validate_sample_counts(10, [])

    assert validate_condition_numbers([2.0, 1e6])
    with pytest.raises(ValidationError):
        validate_condition_numbers([1.5])
    with pytest.raises(ValidationError):
        validate_condition_numbers([float("inf")])

    assert validate_eta_values([0.0, 0.95], 200)
    with pytest.raises(ValidationError):
        validate_eta_values([0.96], 200)
    with pytest.raises(ValidationError, match="no small eigenvalue"):
        validate_eta_values([0.9], 4)

    assert validate_trials(2)
    with pytest.raises(ValidationError):
        validate_trials(1)

    assert validate_seed(0)
    with pytest.raises(ValidationError):
        validate_seed(-5)
    with pytest.raises(ValidationError):
        validate_seed(2 ** 64)


def test_validate_sweep_config_lwls_needs_two_samples():
    """Test LW-LS with n = 1 is rejected up front."""
    sweep = SweepConfig(p=10, n_values=(1, 5), cond_values=(4.0,), eta_values=(0.25,),
                        estimators=(EstimatorKind.LWLS,), trials=10, seed=1,
                        out=Path("x.csv"))
    with pytest.raises(ValidationError, match="LWLS"):
        validate_sweep_config(sweep)

    oracle_only = SweepConfig(p=10, n_values=(1, 5), cond_values=(4.0,),
                              eta_values=(0.25,), estimators=(EstimatorKind.ORACLE,),
                              trials=10, seed=1, out=Path("x.csv"))
    assert validate_sweep_config(oracle_only)
