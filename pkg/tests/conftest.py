import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pseudofront import pipeline
from pseudofront.expr import Constant
from pseudofront.frames import GridSpec

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
RECIPES = os.path.join(ROOT, "docs", "recipes")


def uv_box(n_u=101, u=(-1.0, 1.0), v=(-1.0, 1.0), eps=1):
    h = (u[1] - u[0]) / (n_u - 1)
    n_v = int(round((v[1] - v[0]) / h)) + 1
    return GridSpec("uv", u, v, n_u, n_v, eps)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def pseudosphere():
    """kappa=1, tau=0 on (u, v) in [-1, 1]^2 at 101 x 101."""
    return pipeline.run_cauchy(Constant(1.0), Constant(0.0), uv_box())


@pytest.fixture(scope="session")
def pseudosphere_fine():
    return pipeline.run_cauchy(Constant(1.0), Constant(0.0), uv_box(201), detect=False)


@pytest.fixture(scope="session")
def dini_run():
    return pipeline.run_cauchy(Constant(0.6), Constant(0.8), uv_box())


@pytest.fixture(scope="session")
def helix_run():
    return pipeline.run_cauchy(Constant(1.0), Constant(0.5), uv_box())


def recipe_run(name, **kw):
    from pseudofront import cli, config
    return cli.build(config.load_config(os.path.join(RECIPES, name + ".json")), **kw)


@pytest.fixture(scope="session")
def viviani():
    return recipe_run("viviani")
