import json

import pytest

import mtcp


def small(seed=1):
    return mtcp.sample_harris(mtcp.LatticeWindow(1, 2, 1, 3.0), 2.5, 1.5, seed)


def test_window():
    w = mtcp.LatticeWindow(1, 2, 1, 3.0)
    assert w.num_sites == 5
    assert w.coord(w.index([-2])) == [-2]
    assert w.find([7]) is None


def test_sampling_is_seeded():
    a, b = small(4), small(4)
    assert a.to_json() == b.to_json()
    assert mtcp.HarrisSystem.from_json(a.to_json()).to_json() == a.to_json()


def test_rate_order_is_enforced():
    with pytest.raises(ValueError):
        mtcp.sample_harris(mtcp.LatticeWindow(1, 2, 1, 3.0), 1.5, 2.5, 1)


def test_single_site_dies_at_first_death():
    h = mtcp.sample_harris(mtcp.LatticeWindow(1, 0, 1, 5.0), 2.0, 1.0, 3)
    tr = mtcp.evolve(h, [1], 5.0)
    deaths = h.deaths(0)
    assert tr.final() == ([0] if deaths else [1])


def test_fbip_is_the_only_free_path():
    h = small(2)
    sites = list(range(h.window.num_sites))
    for x in sites:
        paths = mtcp.enumerate_paths(h, sites, 0.0, [x], 3.0, "bip", 400)
        free = [p for p in paths if mtcp.classify(h, p, 0.0)["fbip"]]
        assert len(free) <= 1
        f = mtcp.find_fbip(h, 0.0, x, 3.0)
        assert (f is None) == (not free)
        if f is not None:
            assert f == free[0]


def test_ancestor_matches_rfbip():
    h = small(5)
    for x in range(h.window.num_sites):
        y = mtcp.ancestor_at(h, x, 0.0, 3.0)
        p = mtcp.find_rfbip(h, x, 0.0, 3.0)
        assert (y is None) == (p is None)
        if p is not None:
            assert y == p.end


def test_walk():
    run = mtcp.simulate_walk([[2, 0.7], [-1, 0.3]], [[1.0, 1.0]], n_steps=20, seed=3)
    assert len(run["S"]) == 21
    hits, n = mtcp.cone_experiment([(2, 0.7), (-1, 0.3)], [(1.0, 1.0)], 0.55, 20.0, 200.0, 200, -50, 1)
    assert n == 200 and hits >= 190


def test_cli_run(tmp_path):
    cfg = {
        "window": {"dim": 1, "radius": 4, "range": 1},
        "rates": {"lambda1": 2.5, "lambda2": 1.5},
        "horizon": 2.0,
        "seed": 1,
        "initial": "single_one_in_twos",
    }
    m = mtcp.run("simulate", cfg, tmp_path)
    assert "events.csv" in m["outputs"]
    body = (tmp_path / "system.json").read_text()
    assert json.loads(body)["config_hash"] == m["config_hash"]
    cfg["rates"]["lambda1"] = 1.0
    with pytest.raises(ValueError):
        mtcp.run("simulate", cfg, tmp_path / "bad")
