"""
Input language: quiver files, expressions and batch scripts.

    quiver cm { vertex o; arrow a: o -> o; }
    1/3 a a a          d(a^ a) - a d a^          [@a^, @a] + [a @a^, @a]

Juxtaposition is concatenation, ``a^`` is the dual arrow a*, ``@a`` is ∂_a,
``d`` applies the differential to the next atom, ``[X, Y]`` is XY - YX and
``<v>`` is the idempotent at ``v``.  A bare coefficient stands for that
multiple of the unit Σ e_i.
"""
import logging
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

from arpeggio import EOF, NoMatch, OneOrMore, Optional as Maybe, ParserPython, PTNodeVisitor, ZeroOrMore
from arpeggio import RegExMatch as _
from arpeggio import visit_parse_tree

from .exceptions import ExpressionError, QuiverError
from .forms import FormWord, differential
from .polyvec import DoubledPoly, PolyVector, necklace_normalize
from .quiver import DIFF, VECTOR, Arrow, PathPoly, Quiver, WordCombination

logger = logging.getLogger(__name__)


# grammar


def comment():
    return _(r"#[^\n]*")


def identifier():
    return _(r"[A-Za-z_][A-Za-z0-9_]*")


def vertex_name():
    return _(r"[A-Za-z0-9_]+")


def vertex_decl():
    return _(r"vertex\b"), vertex_name, ";"


def arrow_decl():
    return _(r"arrow\b"), identifier, ":", vertex_name, "->", vertex_name, ";"


def quiver_decl():
    return _(r"quiver\b"), identifier, "{", ZeroOrMore([vertex_decl, arrow_decl]), "}"


def quiver_file():
    return quiver_decl, EOF


def add_op():
    return _(r"[+-]")


def coefficient():
    return _(r"\d+(/\d+)?")


def dual_mark():
    return _(r"\^")


def arrow_ref():
    return identifier, Maybe(dual_mark)


def idempotent():
    return "<", vertex_name, ">"


def vector():
    return "@", arrow_ref


def d_operator():
    return _(r"d(?![A-Za-z0-9_^])")


def differential_of():
    return d_operator, [group, arrow_ref]


def group():
    return "(", sum_, ")"


def commutator():
    return "[", sum_, ",", sum_, "]"


def factor():
    return [commutator, group, differential_of, vector, idempotent, arrow_ref]


def term():
    return [(coefficient, ZeroOrMore(factor)), OneOrMore(factor)]


def sum_():
    return Maybe(add_op), term, ZeroOrMore(add_op, term)


def expression():
    return sum_, EOF


def builtin_ref():
    return _(r"[A-Za-z_][A-Za-z0-9_]*\.[A-Za-z0-9_]+")


def option():
    return _(r"--[a-z][a-z-]*(=[^\s;]+)?")


def argument():
    return [option, builtin_ref, identifier, coefficient]


def let_stmt():
    return _(r"let\b"), identifier, "=", [(builtin_ref, ";"), (sum_, ";")]


def check_stmt():
    return _(r"check\b"), identifier, ZeroOrMore(argument), ";"


def statement():
    return [quiver_decl, let_stmt, check_stmt]


def script():
    return ZeroOrMore(statement), EOF


# semantic values


class Name(NamedTuple):
    text: str
    position: int


class Op(NamedTuple):
    sign: int


class Dual(NamedTuple):
    pass


class VertexDecl(NamedTuple):
    name: str


class Option(NamedTuple):
    key: str
    value: Optional[str]


class Builtin(NamedTuple):
    name: str


class Source(NamedTuple):
    text: str


class LetStatement(NamedTuple):
    name: str
    source: Union[Builtin, str]


class CheckStatement(NamedTuple):
    name: str
    arguments: Tuple[str, ...]
    options: Tuple[Option, ...]


def _flatten(children) -> list:
    flat = []
    for child in children:
        if isinstance(child, list):
            flat.extend(_flatten(child))
        elif child is not None:
            flat.append(child)
    return flat


class _Visitor(PTNodeVisitor):
    """Shared terminal handling: every visitor returns typed values only."""

    def __init__(self, parser: ParserPython, source: str, **kwargs):
        super().__init__(**kwargs)
        self.parser = parser
        self.source = source

    def error(self, message: str, position: int) -> ExpressionError:
        line, column = self.parser.pos_to_linecol(position)
        return ExpressionError(message, line, column)

    def visit__default__(self, node, children):
        if not children and hasattr(node, "value"):
            return node.value
        return list(children)

    def visit_comment(self, node, children):
        return None

    def visit_identifier(self, node, children):
        return Name(str(node.value), node.position)

    def visit_vertex_name(self, node, children):
        return Name(str(node.value), node.position)

    def visit_add_op(self, node, children):
        return Op(-1 if node.value == "-" else 1)

    def visit_coefficient(self, node, children):
        return Fraction(str(node.value))

    def visit_dual_mark(self, node, children):
        return Dual()

    def visit_vertex_decl(self, node, children):
        names = [c for c in _flatten(children) if isinstance(c, Name)]
        return VertexDecl(names[0].text)

    def visit_arrow_decl(self, node, children):
        name, tail, head = [c for c in _flatten(children) if isinstance(c, Name)]
        return Arrow(name.text, tail.text, head.text)

    def visit_quiver_decl(self, node, children):
        flat = _flatten(children)
        name = next(c for c in flat if isinstance(c, Name))
        vertices = tuple(c.name for c in flat if isinstance(c, VertexDecl))
        arrows = tuple(c for c in flat if isinstance(c, Arrow))
        try:
            return Quiver(name.text, vertices, arrows)
        except QuiverError as exc:
            raise self.error(str(exc), node.position) from exc

    def visit_quiver_file(self, node, children):
        return next(c for c in _flatten(children) if isinstance(c, Quiver))


class ExpressionVisitor(_Visitor):
    """Evaluates an expression on a fixed quiver."""

    def __init__(self, parser: ParserPython, source: str, quiver: Quiver, **kwargs):
        super().__init__(parser, source, **kwargs)
        self.quiver = quiver

    def _values(self, children) -> List[WordCombination]:
        return [c for c in _flatten(children) if isinstance(c, WordCombination)]

    def _arrow_name(self, children, position: int) -> str:
        flat = _flatten(children)
        name = next(c for c in flat if isinstance(c, Name)).text
        if any(isinstance(c, Dual) for c in flat):
            name += "^"
        if not self.quiver.has_arrow(name):
            raise self.error(f"unknown arrow {name!r} in quiver {self.quiver.name!r}", position)
        return name

    def visit_arrow_ref(self, node, children):
        name = self._arrow_name(children, node.position)
        return PathPoly.monomial(self.quiver, (self.quiver.arrow_symbol(name),))

    def visit_idempotent(self, node, children):
        name = next(c for c in _flatten(children) if isinstance(c, Name))
        if name.text not in self.quiver.vertices:
            raise self.error(f"unknown vertex {name.text!r}", name.position)
        return self.quiver.idempotent(name.text)

    def visit_vector(self, node, children):
        path = self._values(children)[0]
        ((word, coeff),) = path
        return DoubledPoly.monomial(self.quiver, (self.quiver.vector_symbol(word[0].name),))

    def visit_differential_of(self, node, children):
        (value,) = self._values(children)
        if isinstance(value, DoubledPoly):
            raise self.error("d applies to functions and forms, not to polyvectors", node.position)
        return differential(value)

    def visit_group(self, node, children):
        return self._values(children)[0]

    def visit_commutator(self, node, children):
        left, right = self._values(children)
        return self._add(
            self._multiply([left, right], node), -self._multiply([right, left], node), node
        )

    def visit_factor(self, node, children):
        return self._values(children)[0]

    def _multiply(self, factors: List[WordCombination], node) -> WordCombination:
        result = factors[0]
        for factor in factors[1:]:
            try:
                result = result * factor
            except TypeError as exc:
                raise self.error("cannot multiply differentials with polyvectors", node.position) from exc
        return result

    def visit_term(self, node, children):
        flat = _flatten(children)
        scalar = next((c for c in flat if isinstance(c, Fraction)), Fraction(1))
        factors = self._values(flat)
        if not factors:
            return self.quiver.unit().scale(scalar)
        product = self._multiply(factors, node)
        if product.is_zero and all(not f.is_zero for f in factors):
            line, column = self.parser.pos_to_linecol(node.position)
            logger.warning(
                f"Incomposable word {node.flat_str().strip()!r} at line {line}, "
                f"column {column} parses to 0"
            )
        return product.scale(scalar)

    def visit_sum_(self, node, children):
        sign = 1
        total = None
        for child in _flatten(children):
            if isinstance(child, Op):
                sign = child.sign
            elif isinstance(child, WordCombination):
                value = child.scale(sign)
                total = value if total is None else self._add(total, value, node)
                sign = 1
        return total

    def visit_expression(self, node, children):
        return self._values(children)[0]

    def _add(self, left: WordCombination, right: WordCombination, node) -> WordCombination:
        # plain paths take the type of the other summand
        if type(left) is not type(right):
            if type(left) is PathPoly:
                left = type(right)(left.quiver, left.terms)
            elif type(right) is PathPoly:
                right = type(left)(right.quiver, right.terms)
            else:
                raise self.error("cannot add differentials to polyvectors", node.position)
        return left + right


class ScriptVisitor(_Visitor):
    """Collects statements; expressions are kept as source text."""

    def visit_builtin_ref(self, node, children):
        return Builtin(str(node.value))

    def visit_option(self, node, children):
        key, _, value = str(node.value)[2:].partition("=")
        return Option(key, value or None)

    def visit_sum_(self, node, children):
        return Source(self.source[node.position:node.position_end].strip())

    def visit_let_stmt(self, node, children):
        flat = _flatten(children)
        name = next(c for c in flat if isinstance(c, Name)).text
        source = next(c for c in flat if isinstance(c, (Builtin, Source)))
        return LetStatement(name, source if isinstance(source, Builtin) else source.text)

    def visit_argument(self, node, children):
        return _flatten(children)[0]

    def visit_check_stmt(self, node, children):
        flat = _flatten(children)
        names = [c for c in flat if isinstance(c, Name)]
        arguments = tuple(
            c.name if isinstance(c, Builtin) else c.text if isinstance(c, Name) else str(c)
            for c in flat
            if isinstance(c, (Builtin, Name, Fraction))
        )
        options = tuple(c for c in flat if isinstance(c, Option))
        return CheckStatement(names[0].text, arguments[1:], options)

    def visit_statement(self, node, children):
        return _flatten(children)[0]

    def visit_script(self, node, children):
        return [
            c for c in _flatten(children)
            if isinstance(c, (Quiver, LetStatement, CheckStatement))
        ]


# entry points

_PARSERS = {}


def _parser(rule) -> ParserPython:
    if rule not in _PARSERS:
        _PARSERS[rule] = ParserPython(rule, comment)
    return _PARSERS[rule]


def _parse_tree(rule, source: str):
    parser = _parser(rule)
    try:
        return parser, parser.parse(source)
    except NoMatch as exc:
        logger.error(f"Syntax error at line {exc.line}, column {exc.col}")
        raise ExpressionError(f"syntax error: {exc}", exc.line, exc.col) from None


def parse_quiver(source: str) -> Quiver:
    parser, tree = _parse_tree(quiver_file, source)
    return visit_parse_tree(tree, _Visitor(parser, source))


def parse_expression(source: str, quiver: Quiver) -> WordCombination:
    """Parse to a PathPoly, a FormWord or a PolyVector in necklace normal form."""
    parser, tree = _parse_tree(expression, source)
    value = visit_parse_tree(tree, ExpressionVisitor(parser, source, quiver))
    if isinstance(value, DoubledPoly):
        return necklace_normalize(value)
    if isinstance(value, FormWord) and not any(
        letter.kind == DIFF for word, _ in value for letter in word
    ):
        return PathPoly(quiver, value.terms)
    return value


def parse_script(source: str) -> list:
    """Statements of a batch script, in order; raises before anything runs."""
    parser, tree = _parse_tree(script, source)
    return visit_parse_tree(tree, ScriptVisitor(parser, source))


def is_polyvector(value: WordCombination) -> bool:
    return isinstance(value, PolyVector) or any(
        letter.kind == VECTOR for word, _ in value for letter in word
    )
