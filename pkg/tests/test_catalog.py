import pytest

from bseries_toolkit.bseries import euler_series
from bseries_toolkit.catalog import (
    Registry,
    field_registry,
    get_field,
    get_series,
    get_tableau,
    series_names,
    series_registry,
    tableau_registry,
)
from bseries_toolkit.config import DEFAULT_ORDER_CAP, ENV_AROMATIC_CAP, get_settings, set_overrides
from bseries_toolkit.errors import ConfigError, UnknownNameError
from bseries_toolkit.rk import rk_to_bseries


class TestRegistry:
    def test_register_and_build(self):
        registry: Registry[int] = Registry("number")

        @registry.register(description="the answer", tags=["small"])
        def answer() -> int:
            return 42

        @registry.register(name="double")
        def twice(x: int) -> int:
            """Two times x."""
            return 2 * x

        assert registry.names() == ["answer", "double"]
        assert registry.build("answer") == 42
        assert registry.build("double", 5) == 10
        assert registry.get("double").description == "Two times x."
        assert [e.name for e in registry.get_by_tags(["small"])] == ["answer"]
        assert "answer" in registry
        assert len(registry.all()) == 2

    def test_duplicate_name(self):
        registry: Registry[int] = Registry("number")
        registry.register(name="one")(lambda: 1)
        with pytest.raises(ValueError):
            registry.register(name="one")(lambda: 1)

    def test_unknown_name_lists_known_ones(self):
        with pytest.raises(UnknownNameError) as info:
            get_field("van-der-pol")
        assert "pendulum" in str(info.value)
        assert isinstance(info.value, LookupError)


def test_built_in_names():
    assert {"poly1d", "linear2d", "lotka", "pendulum"} <= set(field_registry.names())
    assert set(tableau_registry.names()) == {"euler", "midpoint", "heun", "rk4", "gauss1", "gauss2", "gauss3"}
    assert {"identity", "exact", "euler", "avf", "expint"} == set(series_registry.names())


def test_series_names_include_tableaux_once():
    names = series_names()
    assert names.count("euler") == 1
    assert "rk4" in names and "gauss2" in names
    assert names[: len(series_registry.names())] == series_registry.names()


def test_get_series_falls_back_to_tableaux():
    assert get_series("euler", 4) == euler_series(4)
    assert get_series("heun", 4) == rk_to_bseries(get_tableau("heun"), 4)
    with pytest.raises(UnknownNameError):
        get_series("leapfrog", 3)


def test_field_tags():
    hamiltonian = [e.name for e in field_registry.get_by_tags(["hamiltonian"])]
    assert hamiltonian == ["pendulum"]


class TestSettings:
    def test_defaults(self):
        assert get_settings().order_cap == DEFAULT_ORDER_CAP

    def test_explicit_overrides_win(self, monkeypatch):
        monkeypatch.setenv(ENV_AROMATIC_CAP, "5")
        set_overrides(aromatic_cap=3, order_cap=None)
        assert get_settings().aromatic_cap == 3
        assert get_settings().order_cap == DEFAULT_ORDER_CAP
        set_overrides()
        assert get_settings().aromatic_cap == 5

    def test_out_of_range_override(self):
        set_overrides(order_cap=50)
        with pytest.raises(ConfigError):
            get_settings()
