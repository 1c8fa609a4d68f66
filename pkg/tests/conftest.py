import warnings
from pathlib import Path

import numpy as np
import pytest

from sosunmix import amuse
from sosunmix.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]
DOCS = ROOT / "docs"


def decorrelated_sources(n, T, rng, delay=1):
    """Random smooth sources whose lag-0 and symmetrised lag-``delay`` covariances are diagonal.

    AR(1) rows of differing smoothness are whitened and then rotated onto the
    eigenbasis of their symmetrised lagged covariance, which makes both
    covariances exactly diagonal on this finite sample.
    """
    coefs = np.linspace(0.1, 0.95, n)
    X = np.empty((n, T))
    e = rng.standard_normal((n, T))
    X[:, 0] = e[:, 0]
    for k in range(1, T):
        X[:, k] = coefs * X[:, k - 1] + e[:, k]
    X -= X.mean(axis=1, keepdims=True)
    lam, V = np.linalg.eigh(X @ X.T / T)
    Z = (V / np.sqrt(lam)).T @ X
    L = Z[:, delay:] @ Z[:, :-delay].T / (T - delay)
    _, W = np.linalg.eigh((L + L.T) / 2)
    S = W.T @ Z
    return S * rng.uniform(0.5, 2.0, size=(n, 1))


@pytest.fixture(scope="session")
def paper2():
    return load_scenario("paper2")


@pytest.fixture(scope="session")
def paper3():
    return load_scenario("paper3")


@pytest.fixture(scope="session")
def inversion():
    return load_scenario("inversion")


@pytest.fixture(scope="session")
def paper2_run(paper2):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        model = amuse(paper2.simulate())
    return paper2, model


# -- acceptance reporting ------------------------------------------------
# Each acceptance test records one PASS/FAIL line; the lines are printed in
# the terminal summary so they show up even when output capture is on.

ACCEPTANCE_IDS = [f"AC-{i}" for i in range(1, 10)]
_acceptance = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_acceptance] = {}


@pytest.fixture
def report_ac(request):
    def report(ac_id, ok, detail):
        line = f"{ac_id}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[_acceptance][ac_id] = line
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_acceptance, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for ac_id in ACCEPTANCE_IDS:
        terminalreporter.write_line(results.get(ac_id, f"{ac_id}: FAIL  (did not report; see test errors)"))
