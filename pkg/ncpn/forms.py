"""
Relative noncommutative differential forms on a path algebra.

Ω•_B(kQ) is the path algebra of the quiver with one extra letter ``d a`` per
arrow, parallel to ``a`` and of degree one, so a form is a combination of
words in arrows and differentials and the graded product is concatenation.
Tensor words [p0 ⊗ p1 ⊗ ... ⊗ pr] = p0 dp1 ... dpr enter through
:meth:`FormWord.from_tensor`.
"""
import logging
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

from .exceptions import QuiverError
from .quiver import (
    ARROW,
    DIFF,
    HOLE,
    MARKER,
    VERTEX,
    PathPoly,
    Quiver,
    Word,
    WordCombination,
    cyclic_normal_form,
    is_closed,
    remainder,
    splice,
    word_degree,
    word_head,
    word_tail,
)

logger = logging.getLogger(__name__)


class FormWord(WordCombination):
    """Element of Ω•_B(kQ): words in arrows and their differentials."""

    product_rank = 1

    @property
    def degree(self) -> int:
        degrees = {word_degree(word) for word, _ in self}
        if len(degrees) > 1:
            raise ValueError(f"form {self} mixes degrees {sorted(degrees)}")
        return degrees.pop() if degrees else 0

    @classmethod
    def from_poly(cls, poly: WordCombination) -> "FormWord":
        return cls(poly.quiver, poly.terms)

    @classmethod
    def from_tensor(cls, quiver: Quiver, head: PathPoly, *slots: PathPoly) -> "FormWord":
        """The class [p0 ⊗ p1 ⊗ ... ⊗ pr] = p0 dp1 ... dpr."""
        result = cls.from_poly(head)
        for slot in slots:
            result = result * d_path(slot)
        return result


class DRForm(FormWord):
    """Canonical representative of a class in DR•_B(kQ).

    Degree one classes are stored as Σ r_b db with the differential last;
    every other degree uses the signed minimal rotation.  Build instances
    with :func:`dr_normalize`.
    """

    def product(self, other):
        raise TypeError("classes in DR are not multiplied; multiply forms first")

    def coefficients(self) -> Dict[str, PathPoly]:
        """The coefficients r_b of a degree one class, keyed by arrow."""
        collected: Dict[str, list] = {}
        for word, coeff in self:
            if word_degree(word) != 1:
                raise ValueError(f"{self} is not a 1-form class")
            letter = word[-1]
            collected.setdefault(letter.name, []).append(
                (remainder(word, len(word) - 1), coeff)
            )
        return {
            name: PathPoly(self.quiver, terms) for name, terms in collected.items()
        }


class Derivation:
    """A B-linear derivation θ of kQ, given by its values θ(a) on arrows.

    Only the part of θ(a) in e_{h(a)} kQ e_{t(a)} is kept, which is the
    canonical form Σ p_a ∂_a.
    """

    def __init__(self, quiver: Quiver, images: Optional[Mapping[str, WordCombination]] = None):
        self.quiver = quiver
        kept: Dict[str, PathPoly] = {}
        for name, image in (images or {}).items():
            arrow = quiver.arrow(name)
            if image.quiver != quiver:
                raise QuiverError("derivation image lives on another quiver")
            parallel = [
                (word, coeff)
                for word, coeff in image
                if word_head(word) == arrow.head and word_tail(word) == arrow.tail
            ]
            if len(parallel) != len(image):
                logger.debug(f"Dropped non-parallel part of the image of {name!r}")
            if parallel:
                kept[name] = PathPoly(quiver, parallel)
        self._images = {name: kept[name] for name in quiver.arrow_names if name in kept}

    @classmethod
    def zero(cls, quiver: Quiver) -> "Derivation":
        return cls(quiver)

    @classmethod
    def partial(cls, quiver: Quiver, name: str, coeff: Optional[PathPoly] = None) -> "Derivation":
        """The derivation p ∂_a, with p the unit when no coefficient is given."""
        arrow = quiver.arrow(name)
        if coeff is None:
            if not arrow.is_loop:
                raise QuiverError(f"∂_{name} needs a coefficient: {name!r} is not a loop")
            coeff = quiver.idempotent(arrow.head)
        return cls(quiver, {name: coeff})

    @classmethod
    def formal(cls, quiver: Quiver, family: str = "h") -> "Derivation":
        """The derivation sending every arrow c to a hole letter θ_c."""
        return cls(
            quiver,
            {
                arrow.name: PathPoly.monomial(quiver, (quiver.hole_symbol(arrow.name, family),))
                for arrow in quiver.arrows
            },
        )

    def image(self, name: str) -> PathPoly:
        return self._images.get(name, PathPoly.zero(self.quiver))

    @property
    def images(self) -> Dict[str, PathPoly]:
        return dict(self._images)

    @property
    def is_zero(self) -> bool:
        return not self._images

    def apply(self, element: WordCombination) -> WordCombination:
        """θ(x) by the Leibniz rule on the arrow letters of ``x``."""
        terms = []
        for word, coeff in element:
            for index, letter in enumerate(word):
                if letter.kind != ARROW or letter.name not in self._images:
                    continue
                for image, factor in self._images[letter.name]:
                    terms.append((splice(word[:index], image, word[index + 1:]), coeff * factor))
        return type(element)(element.quiver, terms)

    def __call__(self, element: WordCombination) -> WordCombination:
        return self.apply(element)

    def _combine(self, other: "Derivation", sign: int) -> "Derivation":
        if other.quiver != self.quiver:
            raise QuiverError("derivations live on different quivers")
        names = set(self._images) | set(other._images)
        return Derivation(
            self.quiver,
            {name: self.image(name) + other.image(name).scale(sign) for name in names},
        )

    def __add__(self, other: "Derivation") -> "Derivation":
        return self._combine(other, 1)

    def __sub__(self, other: "Derivation") -> "Derivation":
        return self._combine(other, -1)

    def __neg__(self) -> "Derivation":
        return self.scale(-1)

    def scale(self, factor) -> "Derivation":
        return Derivation(
            self.quiver, {name: image.scale(factor) for name, image in self._images.items()}
        )

    def __mul__(self, factor) -> "Derivation":
        return self.scale(factor)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.quiver == other.quiver and self._images == other._images

    def __hash__(self) -> int:
        return hash((self.quiver.name, tuple(self._images.items())))

    def vector_terms(self) -> Iterable[Tuple[Word, object]]:
        """Words p ∂_a of the canonical form."""
        for name, image in self._images.items():
            vector = (self.quiver.vector_symbol(name),)
            for word, coeff in image:
                yield splice((), word, vector), coeff

    def __str__(self) -> str:
        return str(WordCombination(self.quiver, list(self.vector_terms())))

    def __repr__(self) -> str:
        return f"Derivation({self.quiver.name!r}, {str(self)!r})"


def form_product(u: FormWord, v: FormWord) -> FormWord:
    """Graded product of forms."""
    return FormWord.from_poly(u) * FormWord.from_poly(v)


def tensor_product(quiver: Quiver, left: Sequence[PathPoly], right: Sequence[PathPoly]) -> FormWord:
    """Product of two tensor words by the alternating contraction sum.

    ``left`` and ``right`` list the tensor slots [p0, p1, ..., pr]; the
    result agrees with :func:`form_product` of the corresponding forms.
    """
    slots = list(left) + list(right)
    r = len(left) - 1
    result = FormWord.zero(quiver)
    for i in range(r + 1):
        merged = slots[:i] + [slots[i] * slots[i + 1]] + slots[i + 2:]
        term = FormWord.from_tensor(quiver, merged[0], *merged[1:])
        result = result + (term if (r - i) % 2 == 0 else -term)
    return result


def differential(u: WordCombination) -> FormWord:
    """The de Rham differential, a degree one derivation with d(d a) = 0."""
    terms = []
    for word, coeff in u:
        odd = 0
        for index, letter in enumerate(word):
            if letter.kind == ARROW:
                replaced = word[:index] + (u.quiver.diff_symbol(letter.name),) + word[index + 1:]
                terms.append((replaced, -coeff if odd % 2 else coeff))
            elif letter.odd:
                odd += 1
    return FormWord(u.quiver, terms)


def d_path(p: PathPoly) -> FormWord:
    return differential(p)


def contract(theta: Derivation, u: WordCombination) -> FormWord:
    """Contraction i_θ: the degree -1 derivation with i_θ(d b) = θ(b)."""
    if theta.quiver != u.quiver:
        raise QuiverError("derivation and form live on different quivers")
    terms = []
    for word, coeff in u:
        odd = 0
        for index, letter in enumerate(word):
            if letter.kind != DIFF:
                continue
            sign = -1 if odd % 2 else 1
            odd += 1
            for image, factor in theta.image(letter.name):
                terms.append((splice(word[:index], image, word[index + 1:]), sign * coeff * factor))
    return FormWord(u.quiver, terms)


def lie_derivative(theta: Derivation, u: WordCombination) -> FormWord:
    """L_θ = d i_θ + i_θ d."""
    return differential(contract(theta, u)) + contract(theta, differential(u))


def dr_normalize(u: WordCombination) -> DRForm:
    """Canonical representative of the class of ``u`` modulo graded commutators."""
    terms = []
    for word, coeff in u:
        if word_degree(word) == 1:
            if not is_closed(word):
                continue
            position = next(i for i, letter in enumerate(word) if letter.odd)
            terms.append((word[position + 1:] + word[:position + 1], coeff))
            continue
        normal = cyclic_normal_form(word)
        if normal is not None:
            rotated, sign = normal
            terms.append((rotated, sign * coeff))
    return DRForm(u.quiver, terms)


def pair(alpha: WordCombination, theta: Derivation) -> DRForm:
    """⟨α, θ⟩ = i_θ(α) modulo commutators."""
    return dr_normalize(contract(theta, alpha))


def one_form(quiver: Quiver, coefficients: Mapping[str, PathPoly]) -> FormWord:
    """The 1-form Σ r_b db from coefficients r_b running h(b) -> t(b)."""
    result = FormWord.zero(quiver)
    for name, coeff in coefficients.items():
        result = result + FormWord.from_poly(coeff) * d_path(quiver.path(name))
    return result


def formal_form(quiver: Quiver, family: str = "S") -> FormWord:
    """Σ_c S_c dc with one marker letter S_c per arrow."""
    return FormWord(
        quiver,
        [
            ((quiver.marker_symbol(arrow.name, family), quiver.diff_symbol(arrow.name)), 1)
            for arrow in quiver.arrows
        ],
    )


def substitute(
    element: WordCombination,
    kind: str,
    replacements: Mapping[str, WordCombination],
    target: Optional[type] = None,
):
    """Replace every letter of ``kind`` by the matching combination.

    Each replacement must run parallel to the letter it replaces.  Letters
    without a replacement make their word vanish.
    """
    target = target or type(element)
    terms = []
    for word, coeff in element:
        partial = [((), coeff)]
        for letter in word:
            if letter.kind != kind:
                partial = [(prefix + (letter,), c) for prefix, c in partial]
                continue
            if letter.name not in replacements:
                partial = []
                break
            partial = [
                (prefix + image, c * factor)
                for prefix, c in partial
                for image, factor in replacements[letter.name]
            ]
        for built, c in partial:
            terms.append((_tidy(built), c))
    return target(element.quiver, terms)


def _tidy(word: Word) -> Word:
    """Drop interior trivial letters left behind by substitution."""
    letters = tuple(letter for letter in word if letter.kind != VERTEX)
    return letters if letters else word[:1]


def has_formal_letters(element: WordCombination) -> bool:
    return any(letter.kind in (HOLE, MARKER) for word, _ in element for letter in word)
