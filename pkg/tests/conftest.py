import numpy as np
import pytest

from ac2focal.synth import NoiseConfig, SceneConfig, generate_scene


def clean_scene(seed=0, motion="random", n_points=2, **kw):
    return generate_scene(SceneConfig(seed=seed, motion=motion, n_points=n_points, **kw))


@pytest.fixture
def scene():
    return clean_scene(seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def noisy_config(seed, sigma, **kw):
    return SceneConfig(seed=seed, noise=NoiseConfig(image_px=sigma), **kw)


# acceptance lines, printed after the run
ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str):
        ACCEPTANCE[criterion] = (bool(passed), detail)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
