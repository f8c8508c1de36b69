"""Demonstrations built from the catalog fields."""

from collections.abc import Sequence

from ..aromatic import KnockoutReport, RelatedFieldPair, knockout_report
from .fields import related_pair


def relatedness_knockout_demo(
    pair: RelatedFieldPair | None = None, points: Sequence | None = None, tol: float = 1e-10
) -> KnockoutReport:
    """Show that f div f cannot appear in a method that respects affine relatedness.

    related-plane projects onto related-line, so every rooted-tree term
    transports while f div f is (1, -0.7) upstairs and 0 downstairs.
    """
    return knockout_report(pair or related_pair(), points, tol)
