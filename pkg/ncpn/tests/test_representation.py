import random
from fractions import Fraction

import pytest

from ncpn.exceptions import RepresentationError
from ncpn.forms import Derivation, differential
from ncpn.registry import builtin, cm_pi
from ncpn.representation import (
    DENOMINATOR_RANGE,
    NUMERATOR_RANGE,
    DimVector,
    GHObservable,
    RepPoint,
    basis_tangents,
    check_invariance,
    directional_value,
    eval_path,
    form_value,
    gh_observable,
    induced_bracket,
    induced_field,
    induced_schouten_check,
    jacobi_check,
    matrix_rows,
    pairing_descent,
    random_gauge,
    random_points,
    tangent_from_rows,
    trace_fn,
)


@pytest.mark.unit
class TestDimVector:
    def test_from_mapping(self, gh):
        dim = DimVector.from_mapping(gh, {"1": 3, "2": 1})
        assert dim.counts == (3, 1)
        assert dim.total == 4
        assert dim.shape("x") == (3, 1)
        assert dim.shape("x^") == (1, 3)
        assert str(dim) == "(3,1)"

    def test_missing_vertices_count_zero(self, gh):
        assert DimVector.from_mapping(gh, {"1": 2}).counts == (2, 0)

    @pytest.mark.parametrize("counts", [(1,), (1, -1), (0, 0)])
    def test_invalid_counts(self, gh, counts):
        with pytest.raises(RepresentationError):
            DimVector(gh, counts)

    def test_unknown_vertex(self, cm):
        with pytest.raises(RepresentationError):
            DimVector.from_mapping(cm, {"p": 2})

    def test_coordinates_are_row_major(self, cm):
        coordinates = DimVector.from_mapping(cm, {"o": 2}).coordinates()
        assert coordinates[:3] == [("a", 0, 0), ("a", 0, 1), ("a", 1, 0)]
        assert len(coordinates) == 8


@pytest.mark.unit
class TestRepPoint:
    def test_rows_round_trip(self, sample_cm_point):
        assert sample_cm_point.to_rows()["a^"] == [[Fraction(1, 2), 0], [3, 1]]

    def test_wrong_shape(self, point_factory, cm):
        with pytest.raises(RepresentationError):
            point_factory(cm, {"o": 2}, {"a": [[1, 2]], "a^": [[1, 0], [0, 1]]})

    def test_missing_arrow(self, point_factory, cm):
        with pytest.raises(RepresentationError):
            point_factory(cm, {"o": 1}, {"a": [[1]]})

    def test_idempotents_become_projectors(self, sample_gh_point, gh):
        assert matrix_rows(eval_path(gh.idempotent("2"), sample_gh_point)) == [
            [0, 0, 0],
            [0, 0, 0],
            [0, 0, 1],
        ]

    def test_other_quiver_is_rejected(self, sample_cm_point, gh):
        with pytest.raises(RepresentationError):
            trace_fn(gh.path("a"), sample_cm_point)


@pytest.mark.unit
class TestTraces:
    def test_sample_values(self, sample_cm_point):
        assert trace_fn(builtin("cm.I2"), sample_cm_point) == 1
        assert trace_fn(builtin("cm.J2"), sample_cm_point) == Fraction(11, 2)
        assert trace_fn(builtin("cm.I3"), sample_cm_point) == 0

    def test_unit_traces_to_the_dimension(self, sample_gh_point, gh):
        assert trace_fn(gh.unit(), sample_gh_point) == 3

    def test_open_paths_are_traceless(self, sample_gh_point, gh):
        assert trace_fn(gh.path("x"), sample_gh_point) == 0

    def test_gauge_invariance(self, sample_gh_point):
        ok, worst = check_invariance(builtin("gh.J2_1"), sample_gh_point, 3, random.Random(7))
        assert ok
        assert worst == 0

    def test_conjugation_moves_the_point(self, sample_cm_point):
        gauge = random_gauge(sample_cm_point.dim, random.Random(3))
        moved = sample_cm_point.conjugate(gauge)
        assert trace_fn(builtin("cm.J3"), moved) == trace_fn(builtin("cm.J3"), sample_cm_point)


@pytest.mark.unit
class TestTangents:
    def test_induced_field_of_a_translation(self, cm, sample_cm_point):
        field = induced_field(Derivation.partial(cm, "a"), sample_cm_point)
        assert field.to_rows() == {"a": [[1, 0], [0, 1]], "a^": [[0, 0], [0, 0]]}

    def test_differential_evaluates_to_the_directional_derivative(self, cm, sample_cm_point):
        f = builtin("cm.J3")
        for tangent in basis_tangents(sample_cm_point.dim):
            assert form_value(differential(f), sample_cm_point, tangent) == directional_value(
                f, sample_cm_point, tangent
            )

    def test_tangent_shape_is_checked(self, sample_cm_point):
        with pytest.raises(RepresentationError):
            tangent_from_rows(sample_cm_point.dim, {"a": [[1]], "a^": [[1]]})

    def test_pairing_descends(self, cm, sample_cm_point, expr_factory):
        theta = Derivation(cm, {"a": expr_factory("a a^"), "a^": expr_factory("a - <o>")})
        for text in ("a^ d a", "a d a^ a", "d a + a^ a d a^"):
            lhs, rhs = pairing_descent(expr_factory(text), theta, sample_cm_point)
            assert lhs == rhs


@pytest.mark.unit
class TestInducedBrackets:
    def test_canonical_pair(self, sample_cm_point):
        j1, i1 = builtin("cm.J1"), builtin("cm.I1")
        assert induced_bracket(cm_pi(0), j1, i1, sample_cm_point) == 2
        assert induced_bracket(cm_pi(0), i1, j1, sample_cm_point) == -2

    def test_antisymmetry(self, sample_gh_point):
        f, g = builtin("gh.I2_1"), builtin("gh.J2")
        pi = builtin("gh.pi1")
        assert induced_bracket(pi, f, g, sample_gh_point) == -induced_bracket(
            pi, g, f, sample_gh_point
        )

    @pytest.mark.parametrize("m", [0, 1])
    def test_jacobi(self, sample_cm_point, m):
        sample = [builtin(name) for name in ("cm.I1", "cm.I2", "cm.J1", "cm.J2")]
        assert jacobi_check(cm_pi(m), sample_cm_point, sample) == 0

    def test_jacobi_on_gibbons_hermsen(self, sample_gh_point):
        sample = [builtin(name) for name in ("gh.I1", "gh.I2_0", "gh.J1", "gh.J2_1")]
        assert jacobi_check(builtin("gh.pi1"), sample_gh_point, sample) == 0

    @pytest.mark.slow
    def test_induced_bivectors_commute(self, sample_cm_point):
        assert induced_schouten_check(cm_pi(0), cm_pi(1), sample_cm_point) == 0


@pytest.mark.unit
class TestObservables:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_framing_functions(self, gh, sample_gh_point, k):
        observable = GHObservable(k, ((-1, 0), (0, 1)))
        value = gh_observable(observable, sample_gh_point)
        assert value == trace_fn(builtin(f"gh.I2_{k}"), sample_gh_point)
        assert value == trace_fn(observable.function(gh), sample_gh_point)

    def test_commutator(self):
        left = GHObservable(1, ((0, 1), (0, 0)))
        right = GHObservable(1, ((0, 0), (1, 0)))
        assert left.commutator(right) == ((1, 0), (0, -1))

    def test_parameter_shape(self):
        with pytest.raises(RepresentationError):
            GHObservable(1, ((1, 0, 0), (0, 1, 0)))

    def test_needs_a_one_dimensional_framing(self, gh, point_factory):
        point = point_factory(
            gh,
            {"1": 1, "2": 2},
            {
                "a": [[1]],
                "x": [[1, 0]],
                "y": [[1], [0]],
                "a^": [[0]],
                "x^": [[0], [1]],
                "y^": [[1, 1]],
            },
        )
        with pytest.raises(RepresentationError):
            gh_observable(GHObservable(0, ((1, 0), (0, 1))), point)


@pytest.mark.unit
class TestRandomPoints:
    def test_seeded(self, gh):
        dim = DimVector.from_mapping(gh, {"1": 2, "2": 1})
        assert random_points(dim, 3, 11) == random_points(dim, 3, 11)
        assert random_points(dim, 1, 11) != random_points(dim, 1, 12)

    def test_entry_ranges(self, cm):
        dim = DimVector.from_mapping(cm, {"o": 3})
        high = max(abs(bound) for bound in NUMERATOR_RANGE)
        for point in random_points(dim, 5, 0):
            for rows in point.to_rows().values():
                for row in rows:
                    for value in row:
                        assert abs(value) <= high
                        assert value.denominator <= DENOMINATOR_RANGE[1]

    def test_point_type(self, cm):
        dim = DimVector.from_mapping(cm, {"o": 2})
        assert all(isinstance(point, RepPoint) for point in random_points(dim, 2, 0))
