import math

import pytest

georing = pytest.importorskip("georing")


def test_radius_and_defaults():
    assert georing.comm_radius(math.exp(math.pi), 0.0) == pytest.approx(1.0)
    r0, d0, t0 = georing.derive_defaults(1.8e6, 0.0, 2.0, 0.25, 1.0)
    assert r0 == pytest.approx(8.5649, rel=1e-4)
    assert d0 == pytest.approx(4.2824, rel=1e-4)
    assert t0 == pytest.approx(0.5731, rel=1e-3)


def test_schedule_and_validation():
    p = georing.make_profile("paper-eps0", 1.8e6)
    s = georing.ring_schedule(p)
    assert s.K == 8
    assert s.rings[3].radius == pytest.approx(68.52, rel=1e-3)
    rep = georing.validate(p)
    assert rep.core_regime_pass
    assert rep.u_max == pytest.approx(2 / 3)
    p.gamma = 1.5
    assert "gamma>1+mu" in georing.validate(p).failed()


def test_stretch():
    value, argmax = georing.stretch_oracle(2.0, 0.25)
    assert value == pytest.approx(georing.stretch_bound(2.0, 0.25), abs=1e-6)
    assert value == pytest.approx(7.7170, abs=1e-4)
    assert argmax == pytest.approx(0.7564, abs=1e-3)


def test_miss_and_overhead():
    p = georing.make_profile("paper-eps0", 1.8e6)
    assert georing.pmiss_asymptotic(p, 3) == pytest.approx(2.87e-3, rel=0.01)
    o = georing.overhead_rate(p)
    assert o["contracting"]
    assert o["ratio"] == pytest.approx(2 ** -0.4)
    assert georing.min_epsilon_for_angle(math.pi / 3) == pytest.approx(16.341, rel=1e-4)


def test_small_simulations():
    p = georing.make_profile("paper-eps2", 5000)
    rows = georing.run_worst_case_miss(p, indices=[1], realizations=1, angles=50, thickness_scale=10.0)
    assert rows[0]["trials"] == 50
    assert rows[0]["misses"] == 0
    res = georing.run_dynamic(p, routes=30, epochs=3, dest_sigma=0.0, seed=2)
    assert res["routes"] == 30
    assert res["delivered"] == 30
    again = georing.run_dynamic(p, routes=30, epochs=3, dest_sigma=0.0, seed=2)
    assert again["stretch"] == res["stretch"]


def test_config_params():
    p = georing.params_from_config('{"profile": "paper-eps0", "n": 5000, "params": {"alpha": 3}}')
    assert p.alpha == 3
    with pytest.raises(ValueError):
        georing.params_from_config('{"unknown": 1}')
