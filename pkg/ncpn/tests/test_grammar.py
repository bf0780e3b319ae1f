import logging
from fractions import Fraction

import pytest

from ncpn.exceptions import ExpressionError
from ncpn.forms import FormWord, differential
from ncpn.grammar import (
    Builtin,
    CheckStatement,
    LetStatement,
    Option,
    is_polyvector,
    parse_expression,
    parse_quiver,
    parse_script,
)
from ncpn.polyvec import PolyVector
from ncpn.quiver import PathPoly, Quiver, double
from ncpn.registry import builtin, cm_pi

GH_SOURCE = """
# framed loop
quiver gh {
  vertex 1;
  vertex 2;
  arrow a: 1 -> 1;
  arrow x: 2 -> 1;
  arrow y: 1 -> 2;
}
"""


@pytest.mark.unit
class TestQuiverFiles:
    def test_parse(self):
        quiver = parse_quiver(GH_SOURCE)
        assert isinstance(quiver, Quiver)
        assert quiver.vertices == ("1", "2")
        assert [(a.name, a.tail, a.head) for a in quiver.arrows] == [
            ("a", "1", "1"),
            ("x", "2", "1"),
            ("y", "1", "2"),
        ]

    def test_printed_double_parses_to_its_base(self, gh):
        assert double(parse_quiver(str(gh))) == gh

    def test_undeclared_vertex_is_located(self):
        with pytest.raises(ExpressionError) as info:
            parse_quiver("quiver q {\n  vertex o;\n  arrow a: o -> p;\n}")
        assert info.value.line is not None

    def test_syntax_error(self):
        with pytest.raises(ExpressionError) as info:
            parse_quiver("quiver q { vertex o arrow a: o -> o; }")
        assert (info.value.line, info.value.column) != (None, None)


@pytest.mark.unit
class TestExpressions:
    def test_paths(self, cm):
        assert parse_expression("1/3 a a a", cm) == cm.path("a", "a", "a").scale(Fraction(1, 3))
        assert isinstance(parse_expression("a a^ - a^ a", cm), PathPoly)

    def test_unit_and_idempotents(self, gh):
        assert parse_expression("2", gh) == gh.unit().scale(2)
        assert parse_expression("<2>", gh) == gh.idempotent("2")

    def test_differential(self, expr_factory):
        value = expr_factory("d(a^ a) - a d a^")
        assert isinstance(value, FormWord)
        assert value == differential(expr_factory("a^ a")) - expr_factory("a d a^")

    def test_commutator_brackets(self, expr_factory):
        assert expr_factory("[a, a^]") == expr_factory("a a^ - a^ a")
        both = expr_factory("[@a^, @a] + [a @a^, @a] + [a^ @a^, @a^]")
        assert both == cm_pi(0).vector + cm_pi(1).vector

    def test_grouping_distributes(self, expr_factory):
        assert expr_factory("(a + a^) a") == expr_factory("a a + a^ a")

    def test_polyvectors_are_normalized(self, expr_factory):
        value = expr_factory("a @a a^ @a^")
        assert isinstance(value, PolyVector)
        assert value == expr_factory("a^ @a^ a @a").scale(-1)
        assert is_polyvector(value)
        assert not is_polyvector(expr_factory("a d a"))

    def test_incomposable_word_warns(self, gh, caplog, monkeypatch):
        monkeypatch.setattr(logging.getLogger("ncpn"), "propagate", True)
        with caplog.at_level(logging.WARNING, logger="ncpn.grammar"):
            assert parse_expression("x a", gh) == 0
        assert "Incomposable" in caplog.text

    @pytest.mark.parametrize(
        "source",
        ["b", "a +", "d @a", "d a @a", "<p>", "[a, ]", "d a + @a"],
    )
    def test_rejected(self, cm, source):
        with pytest.raises(ExpressionError):
            parse_expression(source, cm)

    def test_error_location(self, cm):
        with pytest.raises(ExpressionError) as info:
            parse_expression("a a\n+ b", cm)
        assert info.value.line == 2

    @pytest.mark.parametrize("name", ["cm.pi1", "cm.J3", "gh.pi1", "gh.I2_2"])
    def test_printing_round_trip(self, name):
        value = builtin(name)
        vector = getattr(value, "vector", value)
        assert parse_expression(str(vector), vector.quiver) == vector

    def test_form_printing_round_trip(self, expr_factory):
        value = expr_factory("a d a^ a - 1/2 d a d a^")
        assert expr_factory(str(value)) == value


@pytest.mark.unit
class TestScripts:
    def test_statements(self):
        statements = parse_script(
            GH_SOURCE
            + """
            let pi = gh.pi1;
            let f = a x x^ + 1/2 y^ y;
            check poisson pi;
            check lenard gh.pi0 pi --chain=I2 --links=3;
            """
        )
        assert isinstance(statements[0], Quiver)
        assert statements[1] == LetStatement("pi", Builtin("gh.pi1"))
        assert statements[2] == LetStatement("f", "a x x^ + 1/2 y^ y")
        assert statements[3] == CheckStatement("poisson", ("pi",), ())
        assert statements[4] == CheckStatement(
            "lenard",
            ("gh.pi0", "pi"),
            (Option("chain", "I2"), Option("links", "3")),
        )

    def test_flag_options(self):
        (statement,) = parse_script("check jacobi cm.pi1 --no-timing;")
        assert statement.options == (Option("no-timing", None),)

    def test_empty_script(self):
        assert parse_script("# nothing to do\n") == []

    def test_missing_semicolon(self):
        with pytest.raises(ExpressionError):
            parse_script("check poisson cm.pi1")
