import numpy as np
import pytest

from moglib.begled import BegledParams
from moglib.estimation import FitConfig
from moglib.simulation import (
    TABLE9_TRUTH,
    SimulationError,
    run_simulation,
    stream_id,
    summarize,
    worker_count,
)


@pytest.fixture(scope="module")
def small():
    return run_simulation(TABLE9_TRUTH, n_grid=(30, 50), replications=6, seed=2, workers=1)


def test_report_identities(small):
    for n in small.n_grid:
        for r in small.rows[n]:
            assert r.mse == pytest.approx(r.var + r.bias**2, abs=1e-12)
            assert r.ci_low <= r.mean <= r.ci_high
            assert r.bias == pytest.approx(r.mean - r.truth)


def test_metadata(small):
    assert small.replications == 6 and small.seed == 2 and small.n_grid == (30, 50)
    assert small.summary(30, "alpha").truth == 1.5
    with pytest.raises(KeyError):
        small.summary(30, "gamma")
    d = small.to_dict()
    assert set(d["rows"]) == {"30", "50"}
    assert "alpha" in small.format_table()


def test_deterministic_and_worker_independent(small):
    again = run_simulation(TABLE9_TRUTH, n_grid=(30, 50), replications=6, seed=2, workers=2)
    for n in (30, 50):
        np.testing.assert_array_equal(small.estimates[n], again.estimates[n])


def test_summary_statistics():
    est = np.tile(np.array([1.5, 0.5, 0.7, 0.8, 1.2, 1.3]), (4, 1))
    est[:, 0] = [1.0, 2.0, 1.0, 2.0]
    rows = summarize(TABLE9_TRUTH, est)
    assert rows[0].mean == 1.5 and rows[0].bias == 0.0
    assert rows[0].var == pytest.approx(0.25)
    assert rows[1].mse == 0.0


def test_stream_ids_unique():
    ids = {stream_id(n, r) for n in (30, 50, 100, 200) for r in range(1000)}
    assert len(ids) == 4000


def test_failure_budget():
    # an iteration cap of 1 leaves every fit unconverged
    cfg = FitConfig(max_iter=1, starts=1, margin_starts=1, max_restarts=1)
    with pytest.raises(SimulationError):
        run_simulation(TABLE9_TRUTH, n_grid=(30,), replications=3, config=cfg, workers=1)


def test_bad_replications():
    with pytest.raises(ValueError):
        run_simulation(replications=0)


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("MOGLIB_THREADS", "2")
    assert worker_count(8) == 2
    assert worker_count() <= 2
    monkeypatch.delenv("MOGLIB_THREADS")
    assert worker_count(3) == 3
    assert worker_count(0) == 1


def test_other_truth():
    p = BegledParams(2.0, 0.2, 1.5, 0.5, 0.6, 0.9)
    rep = run_simulation(p, n_grid=(50,), replications=2, seed=1, workers=1)
    assert rep.estimates[50].shape == (2, 6)
