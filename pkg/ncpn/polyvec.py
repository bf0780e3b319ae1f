"""
Noncommutative polyvector fields: necklaces in the alphabet of arrows and
odd letters ``@a`` (∂_a, running like the reversed arrow).
"""
import logging

from .exceptions import QuiverError
from .forms import Derivation
from .quiver import (
    VECTOR,
    PathPoly,
    Symbol,
    WordCombination,
    cyclic_normal_form,
    remainder,
)

logger = logging.getLogger(__name__)


class DoubledPoly(WordCombination):
    """Linear combination of plain words in arrows and ∂ letters."""

    product_rank = 1

    @property
    def grade(self) -> int:
        return grade_of(self)


class PolyVector(DoubledPoly):
    """A polyvector field in necklace normal form.

    Build instances with :func:`necklace_normalize`; every stored word is a
    closed word in its signed minimal rotation.
    """

    def product(self, other):
        raise TypeError("polyvector classes are not multiplied; use schouten()")

    @property
    def is_function(self) -> bool:
        return all(_grade(word) == 0 for word, _ in self)


def _grade(word) -> int:
    return sum(1 for letter in word if letter.kind == VECTOR)


def grade_of(element: WordCombination) -> int:
    """Number of ∂ letters per word; zero for the zero element."""
    grades = {_grade(word) for word, _ in element}
    if len(grades) > 1:
        raise ValueError(f"{element} mixes grades {sorted(grades)}")
    return grades.pop() if grades else 0


def necklace_normalize(element: WordCombination) -> PolyVector:
    """Reduce words modulo PR = (-1)^{pr} RP to signed minimal rotations."""
    terms = []
    for word, coeff in element:
        normal = cyclic_normal_form(word)
        if normal is None:
            continue
        rotated, sign = normal
        terms.append((rotated, sign * coeff))
    return PolyVector(element.quiver, terms)


def directional_derivative(letter: Symbol, element: WordCombination) -> DoubledPoly:
    """D_y: delete each occurrence of ``letter`` and read the rest cyclically.

    The occurrence x_i contributes with sign (-1)^{n_i m_i}, n_i and m_i
    counting ∂ letters in x_1..x_i and in x_{i+1}..x_N.  The result is not
    reduced.
    """
    terms = []
    for word, coeff in element:
        total = _grade(word)
        seen = 0
        for index, symbol in enumerate(word):
            if symbol.kind == VECTOR:
                seen += 1
            if symbol != letter:
                continue
            sign = -1 if (seen * (total - seen)) % 2 else 1
            terms.append((remainder(word, index), sign * coeff))
    return DoubledPoly(element.quiver, terms)


def schouten(lam: WordCombination, xi: WordCombination) -> PolyVector:
    """The Schouten bracket [λ, ξ] of two homogeneous polyvector fields."""
    if lam.quiver != xi.quiver:
        raise QuiverError("polyvectors live on different quivers")
    quiver = lam.quiver
    p = grade_of(lam)
    q = grade_of(xi)
    twist = -1 if ((p + 1) * (q + 1)) % 2 else 1
    total = DoubledPoly.zero(quiver)
    for arrow in quiver.arrows:
        vector = quiver.vector_symbol(arrow.name)
        plain = quiver.arrow_symbol(arrow.name)
        total = total + directional_derivative(vector, lam) * directional_derivative(plain, xi)
        total = total - (
            directional_derivative(vector, xi) * directional_derivative(plain, lam)
        ).scale(twist)
    result = necklace_normalize(total)
    logger.debug(f"Schouten bracket of grades {p}, {q}: {len(result)} terms")
    return result


def necklace_derivative(f: WordCombination, name: str) -> PathPoly:
    """∂f/∂a: rotate each occurrence of ``a`` to the front and delete it."""
    letter = f.quiver.arrow_symbol(name)
    terms = []
    for word, coeff in f:
        if _grade(word):
            raise ValueError("necklace derivatives apply to functions only")
        for index, symbol in enumerate(word):
            if symbol == letter:
                terms.append((remainder(word, index), coeff))
    return PathPoly(f.quiver, terms)


def vector_field(theta: Derivation) -> PolyVector:
    """The grade one necklace Σ p_a ∂_a of a derivation."""
    return necklace_normalize(DoubledPoly(theta.quiver, list(theta.vector_terms())))


def derivation_of(field: WordCombination) -> Derivation:
    """Read a grade one polyvector back as a derivation."""
    images = {}
    for word, coeff in field:
        positions = [i for i, letter in enumerate(word) if letter.kind == VECTOR]
        if len(positions) != 1:
            raise ValueError(f"{field} is not a vector field")
        position = positions[0]
        name = word[position].name
        images.setdefault(name, []).append((remainder(word, position), coeff))
    return Derivation(
        field.quiver,
        {name: PathPoly(field.quiver, terms) for name, terms in images.items()},
    )
