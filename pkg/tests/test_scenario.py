import json

import pytest

from nskw.scenario import ConfigError, Scenario, apply_overrides, load_config, load_preset, preset_names, resolve


@pytest.fixture
def cfg():
    return json.loads(load_preset("constant").to_json())


def test_presets_all_validate():
    names = preset_names()
    assert {"constant", "thm11_i", "decay_a", "decay_b", "mms_standard"} <= set(names)
    for n in names:
        sc = load_preset(n)
        assert sc.name and sc.t_end > 0
        sc.params, sc.grid, sc.control  # noqa: B018


def test_unknown_preset():
    with pytest.raises(ConfigError, match="no preset"):
        load_preset("nope")


@pytest.mark.parametrize(
    "path, value, where",
    [
        (("params", "bogus"), 1, "params"),
        (("colour",), "red", "<root>"),
        (("params", "gamma"), 1.0, "params.gamma"),
        (("grid", "N"), 12, "grid.N"),
        (("grid", "N"), 64.5, "grid.N"),
        (("initial", "kind"), "square", "initial.kind"),
        (("time", "cfl"), 1.5, "time.cfl"),
    ],
)
def test_schema_rejects(cfg, path, value, where):
    node = cfg
    for k in path[:-1]:
        node = node[k]
    node[path[-1]] = value
    with pytest.raises(ConfigError) as ei:
        Scenario.from_dict(cfg)
    assert str(ei.value).startswith(where)


def test_schema_missing_required(cfg):
    del cfg["params"]["beta"]
    with pytest.raises(ConfigError, match="beta"):
        Scenario.from_dict(cfg)


def test_dt_order(cfg):
    cfg["time"].update(dt_min=1.0, dt_max=0.1)
    with pytest.raises(ConfigError, match="dt_min"):
        Scenario.from_dict(cfg)


def test_overrides_apply_and_decode(cfg):
    out = apply_overrides(cfg, ["params.alpha=0.25", "grid.N=128", "initial.seed=null", "initial.kind=tanh_front"])
    assert out["params"]["alpha"] == 0.25
    assert out["grid"]["N"] == 128 and isinstance(out["grid"]["N"], int)
    assert out["initial"]["seed"] is None and out["initial"]["kind"] == "tanh_front"
    assert cfg["params"]["alpha"] == 0.0  # input untouched


def test_overrides_pairs_and_nested_creation(cfg):
    out = apply_overrides(cfg, [("checks.decay.factor", 0.2)])
    assert out["checks"]["decay"] == {"factor": 0.2}


def test_override_type_checked(cfg):
    with pytest.raises(ConfigError, match="grid.N"):
        apply_overrides(cfg, ["grid.N=many"])


@pytest.mark.parametrize("bad", ["params.bogus=1", "nothing", "=3", "grid.N.x=2"])
def test_override_rejects(cfg, bad):
    with pytest.raises(ConfigError):
        apply_overrides(cfg, [bad])


def test_with_overrides_returns_new(cfg):
    sc = Scenario.from_dict(cfg)
    sc2 = sc.with_overrides(["time.t_end=2.5"])
    assert sc.t_end == 1.0 and sc2.t_end == 2.5


def test_load_config_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "name": "x",\n  oops\n}')
    with pytest.raises(ConfigError, match="line 3"):
        load_config(p)


def test_resolve_file_and_preset(tmp_path, cfg):
    p = tmp_path / "mine.json"
    cfg["name"] = "mine"
    p.write_text(json.dumps(cfg))
    assert resolve(str(p)).name == "mine"
    assert resolve("constant").name == "constant"


def test_paramset_from_config():
    p = load_preset("decay_b").params
    assert (p.alpha, p.beta, p.gamma) == (0.25, -2.5, 1.02)
