"""Built-in Butcher tableaux."""

from fractions import Fraction

from ..rk import ButcherTableau, gauss_tableau
from .registry import Registry

tableau_registry: Registry[ButcherTableau] = Registry("tableau")

HALF = Fraction(1, 2)


@tableau_registry.register(description="Forward Euler, order 1", tags=["explicit"])
def euler() -> ButcherTableau:
    return ButcherTableau(((0,),), (1,), name="euler")


@tableau_registry.register(description="Explicit midpoint rule, order 2", tags=["explicit"])
def midpoint() -> ButcherTableau:
    return ButcherTableau(((0, 0), (HALF, 0)), (0, 1), name="midpoint")


@tableau_registry.register(description="Heun's method, order 2", tags=["explicit"])
def heun() -> ButcherTableau:
    return ButcherTableau(((0, 0), (1, 0)), (HALF, HALF), name="heun")


@tableau_registry.register(description="Classical fourth-order Runge-Kutta", tags=["explicit"])
def rk4() -> ButcherTableau:
    a = ((0, 0, 0, 0), (HALF, 0, 0, 0), (0, HALF, 0, 0), (0, 0, 1, 0))
    b = (Fraction(1, 6), Fraction(1, 3), Fraction(1, 3), Fraction(1, 6))
    return ButcherTableau(a, b, name="rk4")


@tableau_registry.register(description="Implicit midpoint (1-stage Gauss), order 2", tags=["implicit", "gauss"])
def gauss1() -> ButcherTableau:
    return gauss_tableau(1)


@tableau_registry.register(description="2-stage Gauss, order 4", tags=["implicit", "gauss"])
def gauss2() -> ButcherTableau:
    return gauss_tableau(2)


@tableau_registry.register(description="3-stage Gauss, order 6", tags=["implicit", "gauss"])
def gauss3() -> ButcherTableau:
    return gauss_tableau(3)


def get_tableau(name: str) -> ButcherTableau:
    return tableau_registry.build(name)
