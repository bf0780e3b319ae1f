import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncpn.exceptions import QuiverError
from ncpn.forms import Derivation, dr_normalize
from ncpn.pn import PoissonMap, cm_necklace_bracket, commutator, function_bracket
from ncpn.polyvec import (
    DoubledPoly,
    PolyVector,
    derivation_of,
    directional_derivative,
    grade_of,
    necklace_derivative,
    necklace_normalize,
    schouten,
    vector_field,
)
from ncpn.registry import builtin, cm_pi

from .strategies import cm_necklaces, cm_paths


def _sign(p, q):
    return -1 if ((p - 1) * (q - 1)) % 2 else 1


@pytest.mark.unit
class TestNecklaces:
    def test_rotations_agree(self, cm):
        word = (cm.arrow_symbol("a"), cm.vector_symbol("a"), cm.arrow_symbol("a^"))
        rotated = word[1:] + word[:1]
        assert necklace_normalize(DoubledPoly.monomial(cm, word)) == necklace_normalize(
            DoubledPoly.monomial(cm, rotated)
        )

    def test_odd_rotation_changes_sign(self, expr_factory):
        assert expr_factory("@a^ @a") == expr_factory("-@a @a^")

    def test_opposite_necklaces_cancel(self, expr_factory):
        assert expr_factory("a @a a^ @a^ + a^ @a^ a @a") == 0

    def test_self_negating_necklace_vanishes(self, cm):
        vector = cm.vector_symbol("a")
        assert necklace_normalize(DoubledPoly.monomial(cm, (vector, vector))) == 0

    def test_open_words_vanish(self, gh):
        assert necklace_normalize(gh.path("x")) == 0

    def test_result_type(self, expr_factory):
        assert isinstance(expr_factory("[@a^, @a]"), PolyVector)

    @settings(max_examples=200, deadline=None)
    @given(cm_necklaces(2))
    def test_idempotent(self, vector):
        assert necklace_normalize(vector) == vector


@pytest.mark.unit
class TestGrades:
    def test_grade_counts_vector_letters(self, expr_factory):
        assert grade_of(expr_factory("[a @a^, @a]")) == 2
        assert grade_of(expr_factory("a a^ @a")) == 1

    def test_zero_has_grade_zero(self, cm):
        assert grade_of(PolyVector.zero(cm)) == 0

    def test_mixed_grades_are_rejected(self, cm):
        mixed = DoubledPoly(
            cm,
            [((cm.vector_symbol("a"),), 1), ((cm.arrow_symbol("a"),), 1)],
        )
        with pytest.raises(ValueError):
            grade_of(mixed)

    def test_bracket_grade(self, cm, expr_factory):
        theta = Derivation(cm, {"a": expr_factory("a a")})
        eta = Derivation(cm, {"a": expr_factory("a^")})
        assert schouten(vector_field(theta), vector_field(eta)).grade == 1
        assert schouten(vector_field(theta), expr_factory("a a^")).grade == 0

    def test_functions(self, expr_factory):
        assert necklace_normalize(expr_factory("a a^")).is_function
        assert not expr_factory("a @a").is_function


@pytest.mark.unit
class TestDerivatives:
    def test_directional_derivative_of_a_vector_letter(self, cm):
        element = DoubledPoly.monomial(cm, (cm.vector_symbol("a^"), cm.vector_symbol("a")))
        result = directional_derivative(cm.vector_symbol("a"), element)
        assert result == DoubledPoly.monomial(cm, (cm.vector_symbol("a^"),))

    def test_directional_derivative_of_an_arrow(self, cm):
        result = directional_derivative(cm.arrow_symbol("a"), cm.path("a", "a", "a"))
        assert result == cm.path("a", "a").scale(3)

    def test_necklace_derivative(self, cm):
        assert necklace_derivative(cm.path("a", "a", "a^"), "a^") == cm.path("a", "a")
        assert necklace_derivative(cm.path("a", "a", "a^"), "a") == (
            cm.path("a", "a^") + cm.path("a^", "a")
        )

    def test_necklace_derivative_needs_a_function(self, expr_factory):
        with pytest.raises(ValueError):
            necklace_derivative(expr_factory("a @a"), "a")


@pytest.mark.unit
class TestSchouten:
    def test_canonical_bivector_is_poisson(self):
        assert schouten(cm_pi(0).vector, cm_pi(0).vector) == 0

    def test_quivers_must_agree(self):
        with pytest.raises(QuiverError):
            schouten(cm_pi(0).vector, builtin("gh.pi0").vector)

    def test_vector_fields_bracket_like_derivations(self, cm, expr_factory):
        theta = Derivation(cm, {"a": expr_factory("a a")})
        eta = Derivation(cm, {"a": expr_factory("a^")})
        expected = vector_field(commutator(theta, eta))
        assert schouten(vector_field(theta), vector_field(eta)) == expected
        assert expected == expr_factory("-a^ a @a - a a^ @a")

    def test_vector_field_acts_on_functions(self, cm, expr_factory):
        theta = Derivation(cm, {"a": expr_factory("a a^"), "a^": expr_factory("a")})
        f = expr_factory("a a a^")
        assert schouten(vector_field(theta), f) == necklace_normalize(theta(f))

    def test_vector_field_round_trip(self, cm, expr_factory):
        theta = Derivation(cm, {"a": expr_factory("a a^ + <o>"), "a^": expr_factory("-a")})
        assert derivation_of(vector_field(theta)) == theta

    @settings(max_examples=100, deadline=None)
    @given(cm_paths(), cm_paths(), cm_paths(), cm_paths())
    def test_commutator_of_derivations(self, p, q, r, s):
        quiver = p.quiver
        theta = Derivation(quiver, {"a": p, "a^": q})
        eta = Derivation(quiver, {"a": r, "a^": s})
        assert schouten(vector_field(theta), vector_field(eta)) == vector_field(
            commutator(theta, eta)
        )

    @pytest.mark.slow
    @settings(max_examples=500, deadline=None)
    @given(cm_necklaces(1), cm_necklaces(2))
    def test_graded_antisymmetry(self, lam, xi):
        p, q = 1, 2
        assert schouten(lam, xi) == schouten(xi, lam).scale(-_sign(p, q))

    @pytest.mark.slow
    @settings(max_examples=500, deadline=None)
    @given(cm_necklaces(2, max_length=3), cm_necklaces(2, max_length=3))
    def test_graded_antisymmetry_of_bivectors(self, lam, xi):
        assert schouten(lam, xi) == schouten(xi, lam).scale(-_sign(2, 2))

    @pytest.mark.slow
    @settings(max_examples=500, deadline=None)
    @given(st.data())
    def test_graded_jacobi(self, data):
        p, q, r = (data.draw(st.integers(0, 2)) for _ in range(3))
        lam = data.draw(cm_necklaces(p, max_length=3))
        mu = data.draw(cm_necklaces(q, max_length=3))
        nu = data.draw(cm_necklaces(r, max_length=3))
        lhs = schouten(lam, schouten(mu, nu))
        rhs = schouten(schouten(lam, mu), nu) + schouten(mu, schouten(lam, nu)).scale(_sign(p, q))
        assert lhs == rhs


@pytest.mark.unit
class TestNecklaceBracket:
    """{f, g}_m through necklace derivatives against the pairing ⟨dg, π̃_m(df)⟩."""

    @pytest.mark.parametrize("m", [0, 1, 2])
    @pytest.mark.parametrize(
        "f,g",
        [
            ("a^", "a"),
            ("a a^", "a^ a^"),
            ("a^ a^", "a a"),
            ("a a a^", "a a^ a^"),
        ],
    )
    def test_routes_agree(self, expr_factory, m, f, g):
        f, g = expr_factory(f), expr_factory(g)
        assert cm_necklace_bracket(f, g, m) == function_bracket(PoissonMap(cm_pi(m)), f, g)

    def test_canonical_pair(self, cm, expr_factory):
        bracket = cm_necklace_bracket(expr_factory("a^"), expr_factory("a"), 0)
        assert bracket == dr_normalize(cm.unit())

    def test_first_flow(self, expr_factory):
        bracket = cm_necklace_bracket(expr_factory("a a^"), expr_factory("a^ a^"), 1)
        assert bracket == dr_normalize(expr_factory("-2 a a^ a^"))
