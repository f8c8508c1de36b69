import numpy as np
import pytest

from bseries_toolkit.catalog import get_field, pendulum, pendulum_hamiltonian, quadratic_field
from bseries_toolkit.eldiff import (
    AffineMap,
    VectorField,
    apply_affine_to_field,
    combination_field,
    differential_field,
    differential_tangent,
    elementary_differential,
    is_energy_preserving_sample,
    is_hamiltonian_sample,
    sample_points,
)
from bseries_toolkit.errors import DerivativeDepthError, DimensionError, SingularMapError, StructureError
from bseries_toolkit.trees import LEAF, chain, parse_tree, trees_up_to

CHERRY = parse_tree("[[][]]")


def fd_copy(f: VectorField) -> VectorField:
    """Same field, derivatives by central differences only."""
    return VectorField(dim=f.dim, value_fn=f.value_fn, name=f"{f.name}-fd")


@pytest.mark.parametrize(
    "encoding, expected",
    [("[]", 1.0), ("[[]]", 2.0), ("[[[]]]", 4.0), ("[[][]]", 2.0), ("[[][][]]", 0.0)],
)
def test_poly1d_differentials_at_one(encoding, expected):
    f = get_field("poly1d")
    assert elementary_differential(parse_tree(encoding), f, [1.0])[0] == pytest.approx(expected)


def test_linear_field_ladders_are_matrix_powers():
    A = np.array([[0.3, -1.0], [0.5, 0.2]])
    f = VectorField(dim=2, value_fn=lambda x: A @ x, derivative_fn=lambda x, d: A @ d[0] if len(d) == 1 else np.zeros(2))
    x = np.array([0.7, -0.4])
    for k in range(1, 5):
        assert np.allclose(elementary_differential(chain(k), f, x), np.linalg.matrix_power(A, k) @ x)
    assert np.allclose(elementary_differential(CHERRY, f, x), 0.0)


def test_mode_follows_derivative_source():
    f = pendulum()
    assert f.mode == "analytic"
    assert fd_copy(f).mode == "finite_difference"
    assert combination_field({CHERRY: 1}, f).mode == "finite_difference"
    assert apply_affine_to_field(AffineMap.identity(2), f).mode == "analytic"


def test_analytic_and_finite_difference_agree(corpus_field, rng):
    g = fd_copy(corpus_field)
    for x in sample_points(corpus_field.dim, 3, rng):
        for tree in trees_up_to(4):
            exact = elementary_differential(tree, corpus_field, x)
            approx = elementary_differential(tree, g, x)
            assert np.allclose(exact, approx, atol=1e-4, rtol=1e-4), tree.encoding


def test_tangent_matches_difference_quotient(rng):
    f = pendulum()
    x, v = rng.normal(size=2), rng.normal(size=2)
    eps = 1e-6
    for tree in trees_up_to(4):
        fd = (elementary_differential(tree, f, x + eps * v) - elementary_differential(tree, f, x - eps * v)) / (2 * eps)
        assert np.allclose(differential_tangent(tree, f, x, v), fd, atol=1e-6), tree.encoding


def test_differential_field_wraps_elementary_differential(rng):
    f = get_field("lotka")
    g = differential_field(CHERRY, f)
    x = rng.normal(size=2)
    assert np.allclose(g(x), elementary_differential(CHERRY, f, x))
    assert g.jacobian(x).shape == (2, 2)


def test_divergence():
    f = get_field("related-plane")
    assert f.divergence([3.0, -2.0]) == pytest.approx(1.0)
    assert pendulum().divergence([0.4, 0.1]) == pytest.approx(0.0)


class TestEnergyAndHamiltonianFacts:
    """Order-3 facts on the pendulum at 10 random points."""

    @pytest.fixture
    def points(self, rng):
        return sample_points(2, 10, rng, scale=2.0)

    def test_ladder_of_three_preserves_energy(self, points):
        g = differential_field(chain(3), pendulum())
        assert is_energy_preserving_sample(g, pendulum_hamiltonian(), points, 1e-8)

    def test_cherry_minus_twice_ladder_is_hamiltonian(self, points):
        g = combination_field({CHERRY: 1, chain(3): -2}, pendulum())
        assert is_hamiltonian_sample(g, pendulum_hamiltonian().J, points, 1e-8)

    def test_ladder_of_two_fails_both(self, points):
        g = differential_field(chain(2), pendulum())
        H = pendulum_hamiltonian()
        assert not is_energy_preserving_sample(g, H, points, 1e-8)
        assert not is_hamiltonian_sample(g, H.J, points, 1e-8)

    def test_field_itself_is_both(self, points):
        g = differential_field(LEAF, pendulum())
        H = pendulum_hamiltonian()
        assert is_energy_preserving_sample(g, H, points, 1e-12)
        assert is_hamiltonian_sample(g, H.J, points, 1e-10)

    def test_structure_matrix_checks(self, points):
        g = pendulum()
        with pytest.raises(StructureError):
            is_hamiltonian_sample(g, np.eye(2), points, 1e-8)
        with pytest.raises(SingularMapError):
            is_hamiltonian_sample(g, np.zeros((2, 2)), points, 1e-8)


def test_affine_transport_of_differentials(corpus_field, rng):
    """A F(t)(f)(x) == F(t)(phi . f)(phi(x)) for every tree."""
    phi = AffineMap.random(corpus_field.dim, rng)
    g = apply_affine_to_field(phi, corpus_field)
    x = rng.uniform(-1, 1, size=corpus_field.dim)
    for tree in trees_up_to(4):
        left = phi.A @ elementary_differential(tree, corpus_field, x)
        right = elementary_differential(tree, g, phi(x))
        assert np.allclose(left, right, atol=1e-8), tree.encoding


class TestAffineAction:
    def test_identity_leaves_the_field_unchanged(self, corpus_field, rng):
        g = apply_affine_to_field(AffineMap.identity(corpus_field.dim), corpus_field)
        for x in sample_points(corpus_field.dim, 5, rng):
            assert np.allclose(g(x), corpus_field(x))
            assert np.allclose(g.jacobian(x), corpus_field.jacobian(x))

    def test_scaling_fixes_the_identity_field(self, rng):
        f = quadratic_field([0.0, 0.0], np.eye(2), name="identity")
        g = apply_affine_to_field(AffineMap(2.0 * np.eye(2), np.zeros(2)), f)
        for x in sample_points(2, 5, rng, scale=3.0):
            assert np.allclose(g(x), x)

    def test_constant_field_becomes_A_c(self, rng):
        c = np.array([1.0, -2.0])
        f = quadratic_field(c, np.zeros((2, 2)), name="constant")
        phi = AffineMap.random(2, rng)
        g = apply_affine_to_field(phi, f)
        for x in sample_points(2, 5, rng, scale=3.0):
            assert np.allclose(g(x), phi.A @ c)

    def test_dimension_must_match(self):
        with pytest.raises(DimensionError):
            apply_affine_to_field(AffineMap.identity(3), pendulum())


def test_singular_affine_map():
    phi = AffineMap(np.array([[1.0, 2.0], [2.0, 4.0]]), np.zeros(2))
    assert not phi.is_invertible()
    with pytest.raises(SingularMapError):
        phi.inverse()


def test_derivative_depth_is_enforced():
    f = VectorField(dim=1, value_fn=lambda x: x**2, derivative_fn=lambda x, d: 2 * d[0] * x, max_derivative=1)
    elementary_differential(chain(3), f, [1.0])
    with pytest.raises(DerivativeDepthError):
        elementary_differential(CHERRY, f, [1.0])


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        pendulum().value([1.0, 2.0, 3.0])
    with pytest.raises(DimensionError):
        AffineMap(np.eye(2), np.zeros(3))
