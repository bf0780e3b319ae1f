"""
Pytest configuration and fixtures for the ncpn engine.
"""
import pytest

from ncpn.checks import Options
from ncpn.grammar import parse_expression
from ncpn.quiver import Arrow, Quiver, double
from ncpn.registry import cm_quiver, gh_quiver
from ncpn.representation import DimVector, RepPoint


@pytest.fixture
def quiver_factory():
    """Factory fixture for creating Quiver instances from (name, tail, head) triples."""
    def create_quiver(name="q", vertices=("o",), arrows=(("a", "o", "o"),), doubled=False):
        quiver = Quiver(name, tuple(vertices), tuple(Arrow(*arrow) for arrow in arrows))
        return double(quiver) if doubled else quiver
    return create_quiver


@pytest.fixture
def cm():
    """The one-loop double carrying the Calogero-Moser structures."""
    return cm_quiver()


@pytest.fixture
def gh():
    """The framed loop double carrying the Gibbons-Hermsen structures."""
    return gh_quiver()


@pytest.fixture
def expr_factory(cm):
    """Factory fixture for parsing expressions, on the one-loop double by default."""
    def create_expr(text, quiver=None):
        return parse_expression(text, quiver or cm)
    return create_expr


@pytest.fixture
def point_factory():
    """Factory fixture for creating RepPoint instances from rational rows."""
    def create_point(quiver, dim, rows):
        return RepPoint.from_rows(DimVector.from_mapping(quiver, dim), rows)
    return create_point


@pytest.fixture
def options_factory():
    """Factory fixture for check options with small sweeps and no timing."""
    def create_options(**overrides):
        values = {"bound": 1, "points": 2, "conjugations": 1, "timing": False}
        values.update(overrides)
        return Options(**values)
    return create_options


@pytest.fixture
def sample_cm_point(cm, point_factory):
    """A fixed point of Rep(cm, 2)."""
    return point_factory(
        cm,
        {"o": 2},
        {"a": [[1, 2], [0, -1]], "a^": [["1/2", 0], [3, 1]]},
    )


@pytest.fixture
def sample_gh_point(gh, point_factory):
    """A fixed point of Rep(gh, (2, 1))."""
    return point_factory(
        gh,
        {"1": 2, "2": 1},
        {
            "a": [[1, -1], [2, 0]],
            "x": [[1], ["1/3"]],
            "y": [[2, -1]],
            "a^": [[0, 1], [1, 1]],
            "x^": [[-2, 1]],
            "y^": [[1], [4]],
        },
    )
