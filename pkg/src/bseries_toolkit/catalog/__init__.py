"""Named fields, series and tableaux for the CLI and the tests."""

from .demos import relatedness_knockout_demo
from .fields import (
    field_registry,
    get_field,
    pendulum,
    pendulum_hamiltonian,
    projection_map,
    quadratic_field,
    related_pair,
)
from .registry import CatalogEntry, Registry
from .series import get_series, series_names, series_registry
from .tableaux import get_tableau, tableau_registry

__all__ = [
    "CatalogEntry",
    "Registry",
    "field_registry",
    "get_field",
    "get_series",
    "get_tableau",
    "pendulum",
    "pendulum_hamiltonian",
    "projection_map",
    "quadratic_field",
    "related_pair",
    "relatedness_knockout_demo",
    "series_names",
    "series_registry",
    "tableau_registry",
]
