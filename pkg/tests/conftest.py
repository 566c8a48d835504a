import pytest
from pathlib import Path

from hetalu.models.adder import ClockConfig

FIXTURES = Path(__file__).parent / "fixtures"
REPO_ROOT = Path(__file__).parent.parent


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    """Keep a developer's .env or shell settings out of the tests."""
    monkeypatch.delenv("HETALU_CALIBRATION", raising=False)
    monkeypatch.delenv("LOG_FILE_PATH", raising=False)


@pytest.fixture
def calibration():
    from hetalu.services.calibration_service import fit_default_calibration
    return fit_default_calibration()


@pytest.fixture
def clock():
    return ClockConfig(1.0)


@pytest.fixture
def dhrystone():
    from hetalu.services.workload_service import dhrystone_profile
    return dhrystone_profile()


@pytest.fixture
def make_config(calibration):
    """Build (policy, config) from a CLI policy name."""
    from hetalu.services.policy_service import build_config, parse_policy

    def factory(policy_text, arch=64, power_level=100, **kwargs):
        policy = parse_policy(policy_text)
        config = build_config(policy, arch, kwargs.pop("table", calibration),
                              power_level=power_level, **kwargs)
        return policy, config
    return factory


@pytest.fixture
def evaluated(dhrystone, make_config):
    """Evaluate the Dhrystone profile for a policy name."""
    from hetalu.services.evaluator_service import evaluate

    def factory(policy_text, arch=64, power_level=100, **kwargs):
        policy, config = make_config(policy_text, arch, power_level, **kwargs)
        return evaluate(dhrystone, policy, config)
    return factory


@pytest.fixture
def sample_trace(tmp_path):
    """Small canonical trace with comments and a non-ADD line."""
    path = tmp_path / "sample.trace"
    path.write_text((FIXTURES / "sample.trace").read_text(encoding="utf-8"), encoding="utf-8")
    return path
