import pytest
import tomli

from pysptags.config import (
    WORKERS_ENV,
    Config,
    LongformSettings,
    RunnerSettings,
    SynthSettings,
    workers_from_env,
)
from pysptags.relabel import RelabelOptions
from pysptags.synth import (
    BurstDeleter,
    FailureKind,
    Oracle,
    RandomErrors,
    StuckAfterNoise,
)
from pysptags.transcript import EndpointMode, ViewKind


def test_defaults():
    """Test the settings used when nothing is configured."""
    config = Config.load(environ={})

    assert config.relabel.options() == RelabelOptions(1, 10_000, False)
    assert config.longform.threshold == 25
    assert config.longform.view == ViewKind.ALL_SPEECH
    assert config.longform.endpoint == EndpointMode.MERGED
    assert config.synth.model == FailureKind.ORACLE
    assert config.runner == RunnerSettings(workers=1, window=256, strict=True)


def test_from_settings(sample_settings):
    """Test that a settings.toml file overrides the defaults it names."""
    config = Config.from_settings(sample_settings)

    assert config.relabel.edit_budget == 0
    assert config.relabel.enumeration_cap == 500
    assert config.longform.threshold == 24
    assert config.longform.view == ViewKind.PRIMARY_ONLY
    assert config.synth.model == FailureKind.STUCK_AFTER_NOISE
    assert config.synth.spec().n_utts == 12
    assert config.synth.failure_model() == StuckAfterNoise(
        seed=7, resume_after_words=40
    )
    assert config.runner.workers == 2
    assert not config.runner.strict
    # Untouched keys keep their defaults
    assert config.synth.words_per_utt == 200
    assert config.runner.window == 256


@pytest.mark.parametrize(
    ("content", "message"),
    [
        ("[relabel]\nedit_budgett = 2\n", "unknown keys in \\[relabel\\]"),
        ("[metrics]\nthreshold = 2\n", "unknown settings section"),
        ("threshold = 2\n", "unknown settings section"),
    ],
)
def test_unknown_settings(tmp_path, content, message):
    """Test that misspelled sections and keys are reported with the file name."""
    path = tmp_path / "settings.toml"
    path.write_text(content)

    with pytest.raises(ValueError, match=message):
        Config.from_settings(path)


def test_invalid_values(tmp_path):
    """Test that values are validated when a file is loaded."""
    path = tmp_path / "settings.toml"
    path.write_text('[longform]\nview = "everything"\n')
    with pytest.raises(ValueError, match="everything"):
        Config.from_settings(path)

    with pytest.raises(ValueError, match="threshold"):
        LongformSettings(threshold=0)
    with pytest.raises(ValueError, match="workers"):
        RunnerSettings(workers=0)


def test_workers_from_env(sample_settings):
    """Test that the environment overrides the settings file."""
    assert workers_from_env({}) is None
    assert workers_from_env({WORKERS_ENV: " "}) is None
    assert workers_from_env({WORKERS_ENV: "3"}) == 3

    config = Config.load(sample_settings, environ={WORKERS_ENV: "4"})
    assert config.runner.workers == 4
    assert config.relabel.edit_budget == 0


@pytest.mark.parametrize("value", ["0", "-2", "many", "1.5"])
def test_workers_from_env_invalid(value):
    """Test that anything but a positive integer is refused."""
    with pytest.raises(ValueError, match=WORKERS_ENV):
        workers_from_env({WORKERS_ENV: value})


def test_to_file_round_trip(tmp_path, sample_settings):
    """Test that a written settings file loads back to the same configuration."""
    config = Config.from_settings(sample_settings)
    path = tmp_path / "nested" / "settings.toml"
    config.to_file(path)

    assert Config.from_settings(path) == config


def test_to_file_contents(tmp_path, sample_settings):
    """Test that enums are written as their values and unset values are left out."""
    path = tmp_path / "settings.toml"
    Config.from_settings(sample_settings).to_file(path)

    with open(path, "rb") as f:
        data = tomli.load(f)
    assert set(data) == {"relabel", "longform", "synth", "runner"}
    assert data["synth"]["model"] == "stuck"
    assert data["longform"]["view"] == "primary"
    assert "burst_start_word" not in data["synth"]
    assert data["runner"]["strict"] is False


def test_to_file_overwrite(tmp_path):
    """Test that an existing settings file is only replaced when asked."""
    path = tmp_path / "settings.toml"
    Config().to_file(path)

    with pytest.raises(OSError, match="already exists"):
        Config().to_file(path)
    Config().to_file(path, overwrite=True)

    with pytest.raises(OSError, match="does not exist"):
        Config().to_file(tmp_path / "missing" / "settings.toml", create_parents=False)


@pytest.mark.parametrize(
    ("settings", "model"),
    [
        (SynthSettings(), Oracle()),
        (
            SynthSettings(model="burst", seed=2, burst_start_word=40, burst_len=25),
            BurstDeleter(seed=2, burst_start_word=40, burst_len=25),
        ),
        (
            SynthSettings(model="random", sub_p=0.1, del_p=0.2, ins_p=0.0),
            RandomErrors(sub_p=0.1, del_p=0.2, ins_p=0.0),
        ),
        (SynthSettings(model="stuck"), StuckAfterNoise()),
    ],
)
def test_failure_model(settings, model):
    """Test that each configured model is built with its own parameters."""
    assert settings.failure_model() == model
