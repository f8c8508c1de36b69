"""Built-in B-series by name; any tableau name also resolves to its series."""

from ..bseries import (
    BSeries,
    avf_series,
    euler_series,
    exact_flow_series,
    exponential_integrator_series,
    identity_series,
)
from ..errors import UnknownNameError
from ..rk import rk_to_bseries
from .registry import Registry
from .tableaux import tableau_registry

series_registry: Registry[BSeries] = Registry("series")

series_registry.register(name="identity", description="x0", tags=["group"])(identity_series)
series_registry.register(name="exact", description="Exact flow, c = 1/(sigma gamma)", tags=["group"])(
    exact_flow_series
)
series_registry.register(name="euler", description="Forward Euler x0 + h f", tags=["group"])(euler_series)
series_registry.register(name="avf", description="Average vector field method", tags=["energy"])(avf_series)
series_registry.register(
    name="expint", description="Exponential integrator x0 + phi(h f') h f", tags=["group"]
)(exponential_integrator_series)


def series_names() -> list[str]:
    """Series names first, then tableau names not shadowed by a series."""
    return series_registry.names() + [n for n in tableau_registry.names() if n not in series_registry]


def get_series(name: str, order: int) -> BSeries:
    """Built-in series truncated at order; tableau names go through rk_to_bseries."""
    if name in series_registry:
        return series_registry.build(name, order)
    if name in tableau_registry:
        return rk_to_bseries(tableau_registry.build(name), order)
    raise UnknownNameError("series", name, series_names())
