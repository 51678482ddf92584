import pytest

from specalloc.entities import (
    Location,
    PrimaryUser,
    Region,
    Scenario,
    SecondaryUser,
    SpectrumSensor,
    scenario_from_json,
    scenario_to_json,
)
from specalloc.validation import require_single_su, validate_scenario

from conftest import make_pu


def build_scenario():
    region = Region(1000.0, 1000.0, 10.0)
    pus = (
        make_pu(0, 123.456789012345, 500.0, -7.25, [(130.0, 500.0), (118.5, 493.25)]),
        make_pu(1, 900.0, 900.0, -29.999999999999996, [(905.0, 901.0)], pur_id_base=10),
    )
    sensors = (SpectrumSensor(0, Location(50.0, 50.0), -93.12345678901234), SpectrumSensor(1, Location(150.0, 50.0), None))
    sus = (SecondaryUser(0, Location(0.1, 999.9)),)
    active = ((SecondaryUser(7, Location(400.0, 400.0)), -13.5),)
    return Scenario(region=region, pus=pus, sensors=sensors, sus=sus, active_sus=active, seed=1234567890123456789)


def test_json_round_trip_bit_exact():
    s = build_scenario()
    line = scenario_to_json(s)
    assert scenario_from_json(line) == s
    # serialization is stable: a second encode matches byte for byte
    assert scenario_to_json(scenario_from_json(line)) == line


def test_json_field_names():
    import json

    d = json.loads(scenario_to_json(build_scenario()))
    assert set(d) == {"region", "pus", "sensors", "sus", "active_sus", "seed"}
    assert set(d["region"]) == {"width_m", "height_m", "grid_cell_m"}
    assert set(d["pus"][0]) == {"id", "x", "y", "power_dbm", "purs"}
    assert set(d["pus"][0]["purs"][0]) == {"id", "x", "y"}
    assert set(d["sensors"][0]) == {"id", "x", "y", "reading_dbm"}
    assert set(d["sus"][0]) == {"id", "x", "y"}
    assert set(d["active_sus"][0]) == {"id", "x", "y", "power_dbm"}


def test_region_invariants():
    with pytest.raises(ValueError):
        Region(0.0, 100.0, 10.0)
    with pytest.raises(ValueError):
        Region(100.0, 100.0, 200.0)
    with pytest.raises(ValueError):
        Region(100.0, 100.0, 0.0)


def test_pu_requires_receivers():
    with pytest.raises(ValueError):
        PrimaryUser(0, Location(1, 1), 0.0, ())


def test_validate_scenario_catches_out_of_region():
    region = Region(100.0, 100.0, 10.0)
    pu = make_pu(0, 50.0, 50.0, 0.0, [(150.0, 50.0)])
    with pytest.raises(ValueError, match="purs"):
        validate_scenario(Scenario(region=region, pus=(pu,)))


def test_validate_scenario_catches_duplicate_ids():
    region = Region(100.0, 100.0, 10.0)
    pus = (make_pu(0, 10.0, 10.0, 0.0, [(11.0, 10.0)]), make_pu(0, 90.0, 90.0, 0.0, [(89.0, 90.0)], pur_id_base=5))
    with pytest.raises(ValueError, match="duplicate"):
        validate_scenario(Scenario(region=region, pus=pus))


def test_require_single_su():
    s = build_scenario()
    require_single_su(s)
    with pytest.raises(ValueError):
        require_single_su(Scenario(region=s.region))
