import math

import pytest

from dualris.channel import ScenarioKind, composite_gain_db
from dualris.config import ConfigError, load_config, parse_config, pt_grid


def write(tmp_path, text):
    p = tmp_path / "run.toml"
    p.write_text(text)
    return p


def test_empty_config_gives_defaults(tmp_path):
    run = load_config(write(tmp_path, ""))
    s = run.scenario
    assert s.kind is ScenarioKind.DRAT
    assert s.fading.m == 10 and s.fading.omega == 1
    assert s.direct_fading.m == 1
    assert s.noise_dbm == -120
    assert (s.geometry.d1, s.geometry.d_rr, s.geometry.d2) == (5, 100, 5)
    assert s.power.xi == pytest.approx(0.2)
    for p in (s.power.p_v_circuit, s.power.p_bs_circuit, s.power.p_ris_element):
        assert p == pytest.approx(0.01)
    assert (s.m1_count, s.m2_count, s.n_count) == (10, 10, 20)
    assert run.grids.r_th == (5.0, 7.5, 10.0)


def test_nakagami_range_error(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(write(tmp_path, "fading.m = 0.3\n"))
    assert exc.value.key == "fading.m"
    assert "0.5" in str(exc.value)


def test_geometry_override(tmp_path):
    run = load_config(write(tmp_path, "geometry.d_rr_m = 200\n"))
    assert run.scenario.geometry.d_rr == 200
    assert composite_gain_db(run.scenario) == pytest.approx(
        2 * (-37.5 - 22 * math.log10(5)) - 37.5 - 22 * math.log10(200)
    )


def test_unknown_key_reports_path():
    with pytest.raises(ConfigError) as exc:
        parse_config({"power": {"pt_dbmm": 3}})
    assert exc.value.key == "power.pt_dbmm"


@pytest.mark.parametrize(
    "tree, key",
    [
        ({"scenario": {"kind": "TRIPLE"}}, "scenario.kind"),
        ({"scenario": {"m1": 0}}, "scenario.m1"),
        ({"scenario": {"m1": 2.5}}, "scenario.m1"),
        ({"geometry": {"d1_m": -1}}, "geometry.d1_m"),
        ({"power": {"xi": -0.1}}, "power.xi"),
        ({"power": {"pt_dbm": "high"}}, "power.pt_dbm"),
        ({"sweep": {"pt_dbm": [0, 10]}}, "sweep.pt_dbm"),
        ({"sweep": {"pt_dbm": [0, 10, 0]}}, "sweep.pt_dbm"),
        ({"sweep": {"elements": []}}, "sweep.elements"),
        ({"sweep": {"elements": [10, 0]}}, "sweep.elements[1]"),
        ({"mc": {"trials": -5}}, "mc.trials"),
        ({"mc": {"allow_large": 1}}, "mc.allow_large"),
    ],
)
def test_validation_errors(tree, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(tree)
    assert exc.value.key == key


def test_dotted_and_nested_are_equivalent(tmp_path):
    a = load_config(write(tmp_path, 'scenario.kind = "srat"\npower.pt_dbm = 15\nsweep.elements = [5, 10]\n'))
    b = parse_config({"scenario": {"kind": "SRAT"}, "power": {"pt_dbm": 15}, "sweep": {"elements": [5, 10]}})
    assert a == b
    assert a.scenario.power.pt_dbm == pytest.approx(15)


def test_sweep_and_mc_keys(tmp_path):
    run = load_config(write(tmp_path, "sweep.pt_dbm = [-10, 30, 5]\nmc.trials = 0\nmc.seed = 7\n"))
    assert run.grids.pt_dbm == (-10, -5, 0, 5, 10, 15, 20, 25, 30)
    assert run.mc.trials == 0 and run.mc.seed == 7


def test_bad_toml(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "this is = = not toml"))


def test_pt_grid_inclusive_and_clean():
    assert pt_grid(0, 1, 0.1)[-1] == 1.0
    assert len(pt_grid(0, 1, 0.1)) == 11
    assert pt_grid(-10, 30, 2.5)[3] == -2.5
