"""
Quivers, paths and the path algebra kQ over the rationals.

A word x1 x2 ... xN is composable when t(x_i) = h(x_{i+1}); it runs from
t(xN) to h(x1), so that e_{h(a)} a = a e_{t(a)} = a.  The same word machinery
carries differential forms (letters ``d a``), polyvector fields (letters
``@a``) and the formal hole/marker letters used by exact reconstructions.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Iterable, Iterator, NamedTuple, Optional, Tuple, Union

from .exceptions import QuiverError

logger = logging.getLogger(__name__)

DUAL_SUFFIX = "^"
RESERVED_NAMES = frozenset({"d", "quiver", "vertex", "arrow"})

VERTEX = "vertex"
ARROW = "arrow"
DIFF = "d"
VECTOR = "vector"
HOLE = "hole"
MARKER = "marker"

KIND_ORDER = {VERTEX: 0, ARROW: 1, DIFF: 2, VECTOR: 3, HOLE: 4, MARKER: 5}
ODD_KINDS = frozenset({DIFF, VECTOR})
FORMAL_KINDS = frozenset({HOLE, MARKER})


class Symbol(NamedTuple):
    """One letter of a word, running from ``tail`` to ``head``."""

    kind: str
    name: str
    tail: str
    head: str
    dual: bool = False
    family: str = ""

    @property
    def odd(self) -> bool:
        return self.kind in ODD_KINDS

    @property
    def key(self) -> tuple:
        return _symbol_key(self)

    def __str__(self) -> str:
        if self.kind == VERTEX:
            return f"<{self.name}>"
        if self.kind == DIFF:
            return f"d {self.name}"
        if self.kind == VECTOR:
            return f"@{self.name}"
        if self.kind in FORMAL_KINDS:
            return f"{{{self.family}:{self.name}}}"
        return self.name


Word = Tuple[Symbol, ...]


@lru_cache(maxsize=None)
def _symbol_key(symbol: Symbol) -> tuple:
    # vertices < original arrows < dual arrows, names compared as bytes
    return (
        KIND_ORDER[symbol.kind],
        int(symbol.dual),
        symbol.family.encode(),
        symbol.name.encode(),
    )


def is_trivial(word: Word) -> bool:
    return len(word) == 1 and word[0].kind == VERTEX


def word_length(word: Word) -> int:
    return 0 if is_trivial(word) else len(word)


def word_head(word: Word) -> str:
    return word[0].head


def word_tail(word: Word) -> str:
    return word[-1].tail


def is_closed(word: Word) -> bool:
    return word_head(word) == word_tail(word)


def word_degree(word: Word) -> int:
    return sum(1 for symbol in word if symbol.odd)


@lru_cache(maxsize=65536)
def word_key(word: Word) -> tuple:
    """Canonical monomial order: length first, then letters."""
    return (word_length(word), tuple(symbol.key for symbol in word))


def is_composable(word: Word) -> bool:
    if not word:
        return False
    if len(word) > 1 and any(symbol.kind == VERTEX for symbol in word):
        return False
    return all(word[i].tail == word[i + 1].head for i in range(len(word) - 1))


def concat_words(left: Word, right: Word) -> Optional[Word]:
    """Concatenate two words, or return None when they do not compose."""
    if word_tail(left) != word_head(right):
        return None
    if is_trivial(left):
        return right
    if is_trivial(right):
        return left
    return left + right


def splice(prefix: Word, middle: Word, suffix: Word) -> Word:
    """Put ``middle`` between two (possibly empty) pieces of a word."""
    if is_trivial(middle):
        return prefix + suffix if (prefix or suffix) else middle
    return prefix + middle + suffix


def remainder(word: Word, position: int) -> Word:
    """Delete one letter and read the rest cyclically, starting after it."""
    rest = word[position + 1:] + word[:position]
    if rest:
        return rest
    letter = word[position]
    return (Symbol(VERTEX, letter.head, letter.head, letter.head),)


def rotations(word: Word) -> Iterator[Tuple[Word, int]]:
    """Cyclic rotations of a closed word with their Koszul signs.

    Yields ``(rotated, sign)`` with ``word == sign * rotated`` modulo graded
    commutators.
    """
    total = word_degree(word)
    sign = 1
    current = word
    for _ in range(len(word)):
        yield current, sign
        if current[0].odd and (total - 1) % 2:
            sign = -sign
        current = current[1:] + current[:1]


@lru_cache(maxsize=65536)
def cyclic_normal_form(word: Word) -> Optional[Tuple[Word, int]]:
    """Signed minimal rotation of a word, or None when its class is zero.

    Open words vanish, and so does a word that its own rotations send to
    its negative.
    """
    if not is_closed(word):
        return None
    if is_trivial(word):
        return word, 1
    best: Optional[Word] = None
    best_sign = 0
    for rotated, sign in rotations(word):
        if best is None or word_key(rotated) < word_key(best):
            best, best_sign = rotated, sign
        elif rotated == best and sign != best_sign:
            return None
    return best, best_sign


def format_word(word: Word) -> str:
    return " ".join(str(symbol) for symbol in word)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"cannot use {value!r} as a rational coefficient")


def format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


Scalar = Union[int, Fraction]
TermSource = Union[Dict[Word, Scalar], Iterable[Tuple[Word, Scalar]], None]


class WordCombination:
    """Immutable Q-linear combination of composable words on one quiver.

    Terms are kept in canonical monomial order and zero coefficients are
    never stored.  Multiplication of two combinations is concatenation,
    extended bilinearly; incomposable products vanish.
    """

    product_rank = 0

    def __init__(self, quiver: "Quiver", terms: TermSource = None):
        self.quiver = quiver
        collected: Dict[Word, Fraction] = {}
        pairs = terms.items() if isinstance(terms, dict) else (terms or ())
        for word, coeff in pairs:
            value = as_fraction(coeff)
            if value:
                collected[word] = collected.get(word, Fraction(0)) + value
        self._terms = {
            word: collected[word]
            for word in sorted(collected, key=word_key)
            if collected[word]
        }

    @classmethod
    def zero(cls, quiver: "Quiver"):
        return cls(quiver)

    @classmethod
    def monomial(cls, quiver: "Quiver", word: Word, coeff: Scalar = 1):
        return cls(quiver, {word: coeff})

    def _new(self, terms: TermSource):
        return type(self)(self.quiver, terms)

    def _check_quiver(self, other: "WordCombination") -> None:
        if other.quiver != self.quiver:
            raise QuiverError(
                f"operands live on different quivers: "
                f"{self.quiver.name!r} and {other.quiver.name!r}"
            )

    # container protocol

    def __iter__(self) -> Iterator[Tuple[Word, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def terms(self) -> Dict[Word, Fraction]:
        return dict(self._terms)

    def words(self) -> Tuple[Word, ...]:
        return tuple(self._terms)

    def coefficient(self, word: Word) -> Fraction:
        return self._terms.get(word, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    # linear structure

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, WordCombination):
            return NotImplemented
        self._check_quiver(other)
        return self._new(list(self._terms.items()) + list(other._terms.items()))

    def __radd__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return NotImplemented

    def __neg__(self):
        return self._new({word: -coeff for word, coeff in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        if not isinstance(other, WordCombination):
            return NotImplemented
        return self + (-other)

    def scale(self, factor: Scalar):
        factor = as_fraction(factor)
        return self._new({word: factor * coeff for word, coeff in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, WordCombination):
            return self.product(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def product(self, other: "WordCombination"):
        self._check_quiver(other)
        if self.product_rank and other.product_rank and type(self) is not type(other):
            raise TypeError(
                f"cannot multiply {type(self).__name__} by {type(other).__name__}"
            )
        target = type(other) if other.product_rank > self.product_rank else type(self)
        terms = []
        for left, a in self._terms.items():
            for right, b in other._terms.items():
                word = concat_words(left, right)
                if word is not None:
                    terms.append((word, a * b))
        return target(self.quiver, terms)

    def map_terms(self, fn):
        """Rebuild from ``fn(word)``, which yields ``(word, factor)`` pairs."""
        terms = []
        for word, coeff in self._terms.items():
            for image, factor in fn(word):
                terms.append((image, coeff * factor))
        return self._new(terms)

    # comparison and printing

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero
        if not isinstance(other, WordCombination):
            return NotImplemented
        return self.quiver == other.quiver and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.quiver.name, tuple(self._terms.items())))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for index, (word, coeff) in enumerate(self._terms.items()):
            body = format_word(word)
            magnitude = abs(coeff)
            if magnitude != 1:
                body = f"{format_fraction(magnitude)} {body}"
            if index == 0:
                parts.append(f"-{body}" if coeff < 0 else body)
            else:
                parts.append(f"{'-' if coeff < 0 else '+'} {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.quiver.name!r}, {str(self)!r})"


class PathPoly(WordCombination):
    """Element of the path algebra kQ."""

    def paths(self) -> Iterator[Tuple["Path", Fraction]]:
        for word, coeff in self:
            yield Path(self.quiver, word), coeff


@dataclass(frozen=True)
class Path:
    """A trivial path at a vertex or a composable word of arrows."""

    quiver: "Quiver"
    word: Word

    def __post_init__(self):
        if not is_composable(self.word):
            raise QuiverError(f"word {format_word(self.word)!r} is not composable")

    @property
    def head(self) -> str:
        return word_head(self.word)

    @property
    def tail(self) -> str:
        return word_tail(self.word)

    @property
    def length(self) -> int:
        return word_length(self.word)

    @property
    def is_trivial(self) -> bool:
        return is_trivial(self.word)

    def as_poly(self) -> PathPoly:
        return PathPoly.monomial(self.quiver, self.word)

    def __str__(self) -> str:
        return format_word(self.word)


def concat(p: Path, q: Path) -> PathPoly:
    """Concatenate two paths; incomposable paths give the zero element."""
    if p.quiver != q.quiver:
        raise QuiverError("paths live on different quivers")
    word = concat_words(p.word, q.word)
    if word is None:
        return PathPoly.zero(p.quiver)
    return PathPoly.monomial(p.quiver, word)


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: str
    head: str
    dual_of: Optional[str] = None

    @property
    def is_dual(self) -> bool:
        return self.dual_of is not None

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Quiver:
    """A finite oriented graph with named vertices and arrows."""

    name: str
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if not self.vertices:
            raise QuiverError(f"quiver {self.name!r} has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError(f"quiver {self.name!r} repeats a vertex name")
        names = [arrow.name for arrow in self.arrows]
        if len(set(names)) != len(names) or set(names) & set(self.vertices):
            raise QuiverError(f"quiver {self.name!r} repeats a name")
        for arrow in self.arrows:
            if arrow.name in RESERVED_NAMES:
                raise QuiverError(f"{arrow.name!r} is a reserved word")
            if arrow.name.endswith(DUAL_SUFFIX) and not arrow.is_dual:
                raise QuiverError(
                    f"arrow names ending in {DUAL_SUFFIX!r} are kept for dual arrows"
                )
            if arrow.tail not in self.vertices or arrow.head not in self.vertices:
                raise QuiverError(
                    f"arrow {arrow.name!r} joins undeclared vertices "
                    f"{arrow.tail!r} -> {arrow.head!r}"
                )

    @cached_property
    def _arrow_index(self) -> Dict[str, Arrow]:
        return {arrow.name: arrow for arrow in self.arrows}

    @property
    def arrow_names(self) -> Tuple[str, ...]:
        return tuple(arrow.name for arrow in self.arrows)

    @property
    def base_arrows(self) -> Tuple[Arrow, ...]:
        return tuple(arrow for arrow in self.arrows if not arrow.is_dual)

    def has_arrow(self, name: str) -> bool:
        return name in self._arrow_index

    def arrow(self, name: str) -> Arrow:
        try:
            return self._arrow_index[name]
        except KeyError:
            raise QuiverError(f"quiver {self.name!r} has no arrow {name!r}") from None

    # letters

    def vertex_symbol(self, vertex: str) -> Symbol:
        if vertex not in self.vertices:
            raise QuiverError(f"quiver {self.name!r} has no vertex {vertex!r}")
        return Symbol(VERTEX, vertex, vertex, vertex)

    def arrow_symbol(self, name: str) -> Symbol:
        arrow = self.arrow(name)
        return Symbol(ARROW, name, arrow.tail, arrow.head, arrow.is_dual)

    def diff_symbol(self, name: str) -> Symbol:
        arrow = self.arrow(name)
        return Symbol(DIFF, name, arrow.tail, arrow.head, arrow.is_dual)

    def vector_symbol(self, name: str) -> Symbol:
        arrow = self.arrow(name)
        return Symbol(VECTOR, name, arrow.head, arrow.tail, arrow.is_dual)

    def hole_symbol(self, name: str, family: str = "h") -> Symbol:
        """Formal letter parallel to an arrow, standing for θ(a)."""
        arrow = self.arrow(name)
        return Symbol(HOLE, name, arrow.tail, arrow.head, arrow.is_dual, family)

    def marker_symbol(self, name: str, family: str = "S") -> Symbol:
        """Formal letter opposite to an arrow, standing for a coefficient S_a."""
        arrow = self.arrow(name)
        return Symbol(MARKER, name, arrow.head, arrow.tail, arrow.is_dual, family)

    # elements of kQ

    def idempotent(self, vertex: str) -> PathPoly:
        return PathPoly.monomial(self, (self.vertex_symbol(vertex),))

    def unit(self) -> PathPoly:
        return PathPoly(self, [((self.vertex_symbol(v),), 1) for v in self.vertices])

    def path(self, *names: str) -> PathPoly:
        """Path through the given arrows, or zero when they do not compose."""
        if not names:
            raise QuiverError("a path needs at least one arrow; use idempotent()")
        word = tuple(self.arrow_symbol(name) for name in names)
        if not is_composable(word):
            return PathPoly.zero(self)
        return PathPoly.monomial(self, word)

    def trivial_word(self, vertex: str) -> Word:
        return (self.vertex_symbol(vertex),)

    def paths_between(self, head: str, tail: str, max_length: int) -> Tuple[Word, ...]:
        """All paths from ``tail`` to ``head`` of length at most ``max_length``."""
        found = []
        if head == tail:
            found.append(self.trivial_word(head))
        layer = [(self.arrow_symbol(a.name),) for a in self.arrows if a.head == head]
        for _ in range(max_length):
            found.extend(word for word in layer if word_tail(word) == tail)
            layer = [
                word + (self.arrow_symbol(a.name),)
                for word in layer
                for a in self.arrows
                if a.head == word_tail(word)
            ]
        return tuple(sorted(found, key=word_key))

    def __str__(self) -> str:
        lines = [f"quiver {self.name} {{"]
        lines += [f"  vertex {vertex};" for vertex in self.vertices]
        lines += [
            f"  arrow {arrow.name}: {arrow.tail} -> {arrow.head};"
            for arrow in self.base_arrows
        ]
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class DoubledQuiver(Quiver):
    """A quiver together with one reversed dual arrow a^ per arrow a."""

    base: Optional[Quiver] = None

    def dual_name(self, name: str) -> str:
        arrow = self.arrow(name)
        return arrow.dual_of if arrow.is_dual else name + DUAL_SUFFIX

    def __str__(self) -> str:
        return str(self.base) if self.base is not None else super().__str__()


def double(quiver: Quiver) -> DoubledQuiver:
    """Attach to every arrow a dual arrow with reversed endpoints."""
    duals = tuple(
        Arrow(arrow.name + DUAL_SUFFIX, arrow.head, arrow.tail, dual_of=arrow.name)
        for arrow in quiver.arrows
    )
    doubled = DoubledQuiver(
        name=f"{quiver.name}_double",
        vertices=quiver.vertices,
        arrows=quiver.arrows + duals,
        base=quiver,
    )
    logger.debug(f"Doubled quiver {quiver.name!r}: {len(doubled.arrows)} arrows")
    return doubled
