import math

import pytest

import riccikit


def test_catalog_lists_every_id():
    ids = {e["id"] for e in riccikit.catalog()}
    assert len(ids) == 22
    assert {"classical_bl", "hardy_boundary", "muq_lsi"} <= ids


def test_gaussian_check_passes():
    rows = riccikit.check(
        {"id": "classical_bl", "measure": {"kind": "gaussian"}, "dims": [2], "samples": 4000, "seed": 3}
    )
    assert rows
    assert all(r["status"] == "pass" for r in rows)
    x1 = next(r for r in rows if r["function"] == "x1")
    assert abs(x1["rhs"] - 1.0) < 1e-12


def test_csv_header():
    text = riccikit.check_csv(
        {"id": "classical_bl", "measure": {"kind": "gaussian"}, "dims": [1], "samples": 1000, "functions": ["x1"]}
    )
    lines = text.strip().splitlines()
    assert lines[0].startswith("suite,inequality,dim,function")
    assert len(lines) == 2


def test_config_errors_raise():
    with pytest.raises(riccikit.RiccikitError):
        riccikit.check({"id": "clasical_bl", "dims": [2]})
    with pytest.raises(riccikit.RiccikitError):
        riccikit.check({"id": "hardy_boundary", "dims": [3]})


def test_spectral_gap_of_the_unit_interval():
    gap, cp = riccikit.spectral_gap({"kind": "uniform", "a": 0.0, "b": 1.0}, 0.0, 1.0, 1024)
    assert abs(gap - math.pi**2) < 1e-4
    assert abs(cp * gap - 1.0) < 1e-12


def test_exponential_to_uniform_map():
    xs = [0.1, 1.0, 3.0]
    for x, (t, dt) in zip(xs, riccikit.monotone_map({"kind": "exponential"}, {"kind": "uniform"}, xs)):
        assert abs(t - (1 - math.exp(-x))) < 1e-10
        assert abs(dt - math.exp(-x)) < 1e-8


def test_closed_forms():
    q, c, x = 1.5, 1.0, 0.7
    expected = c * q * q / 2 * x ** (q - 2) + q * (2 - q) / (4 * x * x)
    assert abs(riccikit.ric_1d_power(c, q, x) - expected) < 1e-12
    assert riccikit.small_dimension_condition(-6.0, 8)
    assert not riccikit.small_dimension_condition(-6.0, 4)
    assert abs(riccikit.rho_poly_monotone(0.5, 2.0) - 1.0) < 1e-12


def test_sampling_is_seeded():
    a = riccikit.sample({"kind": "gaussian"}, 2, 500, 7)
    b = riccikit.sample({"kind": "gaussian"}, 2, 500, 7, workers=2)
    assert a.shape == (500, 2)
    assert (a == b).all()
