"""
Descent to representation spaces with exact rational matrices.

Every arrow block τ_a (n_{h(a)} x n_{t(a)}) is embedded into a |n| x |n|
matrix, vertex idempotents become block projectors, and words evaluate to
ordinary matrix products in one ring.
"""
import itertools
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import RepresentationError
from .forms import Derivation, formal_form, pair
from .pn import PoissonMap, function_bracket
from .quiver import (
    ARROW,
    DIFF,
    MARKER,
    VERTEX,
    PathPoly,
    Quiver,
    Symbol,
    WordCombination,
    as_fraction,
)

logger = logging.getLogger(__name__)

NUMERATOR_RANGE = (-9, 9)
DENOMINATOR_RANGE = (1, 4)


def to_qq(value):
    value = as_fraction(value)
    return QQ(value.numerator, value.denominator)


def from_qq(element) -> Fraction:
    return Fraction(int(element.numerator), int(element.denominator))


def matrix_from_entries(entries: Mapping[Tuple[int, int], object], shape: Tuple[int, int]) -> DomainMatrix:
    rows: Dict[int, Dict[int, object]] = {}
    for (i, j), value in entries.items():
        element = to_qq(value)
        if element:
            rows.setdefault(i, {})[j] = element
    return DomainMatrix(rows, shape, QQ)


def matrix_from_rows(rows: Sequence[Sequence[object]], shape: Tuple[int, int]) -> DomainMatrix:
    if len(rows) != shape[0] or any(len(row) != shape[1] for row in rows):
        raise RepresentationError(f"expected a {shape[0]}x{shape[1]} matrix")
    return matrix_from_entries(
        {(i, j): value for i, row in enumerate(rows) for j, value in enumerate(row)}, shape
    )


def matrix_rows(matrix: DomainMatrix) -> List[List[Fraction]]:
    rows, cols = matrix.shape
    return [[from_qq(matrix[i, j].element) for j in range(cols)] for i in range(rows)]


def trace(matrix: DomainMatrix) -> Fraction:
    return from_qq(sum(matrix.diagonal(), QQ.zero))


def unit_matrix(size: int, row: int, col: int) -> DomainMatrix:
    return matrix_from_entries({(row, col): 1}, (size, size))


@dataclass(frozen=True)
class DimVector:
    """One nonnegative count per vertex, in the quiver's vertex order."""

    quiver: Quiver
    counts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        if len(self.counts) != len(self.quiver.vertices):
            raise RepresentationError(
                f"dimension vector needs {len(self.quiver.vertices)} entries"
            )
        if any(n < 0 for n in self.counts) or not any(self.counts):
            raise RepresentationError(f"invalid dimension vector {self.counts}")

    @classmethod
    def from_mapping(cls, quiver: Quiver, counts: Mapping[str, int]) -> "DimVector":
        unknown = set(counts) - set(quiver.vertices)
        if unknown:
            raise RepresentationError(f"unknown vertices {sorted(unknown)}")
        return cls(quiver, tuple(int(counts.get(v, 0)) for v in quiver.vertices))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def size(self, vertex: str) -> int:
        return self.counts[self.quiver.vertices.index(vertex)]

    def offset(self, vertex: str) -> int:
        return sum(self.counts[: self.quiver.vertices.index(vertex)])

    def shape(self, name: str) -> Tuple[int, int]:
        arrow = self.quiver.arrow(name)
        return self.size(arrow.head), self.size(arrow.tail)

    def as_mapping(self) -> Dict[str, int]:
        return dict(zip(self.quiver.vertices, self.counts))

    def coordinates(self) -> List[Tuple[str, int, int]]:
        """Matrix entries (arrow, i, j), row-major, arrows in declaration order."""
        return [
            (arrow.name, i, j)
            for arrow in self.quiver.arrows
            for i in range(self.size(arrow.head))
            for j in range(self.size(arrow.tail))
        ]

    def __str__(self) -> str:
        return "(" + ",".join(str(n) for n in self.counts) + ")"


class _Blocks:
    """Per-arrow blocks on a dimension vector, with their global embeddings."""

    def __init__(self, dim: DimVector, blocks: Mapping[str, DomainMatrix]):
        self.dim = dim
        missing = set(dim.quiver.arrow_names) - set(blocks)
        if missing:
            raise RepresentationError(f"no matrix for arrows {sorted(missing)}")
        for name, block in blocks.items():
            if block.shape != dim.shape(name):
                raise RepresentationError(
                    f"arrow {name!r} needs shape {dim.shape(name)}, got {block.shape}"
                )
        self.blocks = {name: blocks[name] for name in dim.quiver.arrow_names}
        self._embedded: Dict[str, DomainMatrix] = {}

    @property
    def quiver(self) -> Quiver:
        return self.dim.quiver

    def embedded(self, name: str) -> DomainMatrix:
        if name not in self._embedded:
            arrow = self.quiver.arrow(name)
            row, col = self.dim.offset(arrow.head), self.dim.offset(arrow.tail)
            block = self.blocks[name]
            rows, cols = block.shape
            self._embedded[name] = matrix_from_entries(
                {
                    (row + i, col + j): from_qq(block[i, j].element)
                    for i in range(rows)
                    for j in range(cols)
                },
                (self.dim.total, self.dim.total),
            )
        return self._embedded[name]

    def block_of(self, name: str, matrix: DomainMatrix) -> DomainMatrix:
        """Cut the block of ``name`` out of a global matrix."""
        arrow = self.quiver.arrow(name)
        row, col = self.dim.offset(arrow.head), self.dim.offset(arrow.tail)
        rows, cols = self.dim.shape(name)
        return matrix_from_entries(
            {
                (i, j): from_qq(matrix[row + i, col + j].element)
                for i in range(rows)
                for j in range(cols)
            },
            (rows, cols),
        )

    def to_rows(self) -> Dict[str, List[List[Fraction]]]:
        return {name: matrix_rows(block) for name, block in self.blocks.items()}


class RepPoint(_Blocks):
    """A point of Rep(Q, n): one rational matrix per arrow."""

    @classmethod
    def from_rows(cls, dim: DimVector, rows: Mapping[str, Sequence[Sequence[object]]]) -> "RepPoint":
        return cls(dim, {name: matrix_from_rows(r, dim.shape(name)) for name, r in rows.items()})

    def projector(self, vertex: str) -> DomainMatrix:
        start = self.dim.offset(vertex)
        return matrix_from_entries(
            {(start + i, start + i): 1 for i in range(self.dim.size(vertex))},
            (self.dim.total, self.dim.total),
        )

    def conjugate(self, gauge: Mapping[str, DomainMatrix]) -> "RepPoint":
        """τ_a ↦ g_{h(a)} τ_a g_{t(a)}⁻¹."""
        inverses = {vertex: g.inv() for vertex, g in gauge.items() if g.shape[0]}
        blocks = {}
        for arrow in self.quiver.arrows:
            block = self.blocks[arrow.name]
            if 0 in block.shape:
                blocks[arrow.name] = block
                continue
            blocks[arrow.name] = gauge[arrow.head] * block * inverses[arrow.tail]
        return RepPoint(self.dim, blocks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepPoint):
            return NotImplemented
        return self.dim == other.dim and self.to_rows() == other.to_rows()


class RepTangent(_Blocks):
    """A tangent vector at a representation: one matrix per arrow."""

    def __eq__(self, other) -> bool:
        if not isinstance(other, RepTangent):
            return NotImplemented
        return self.dim == other.dim and self.to_rows() == other.to_rows()


# evaluation


def evaluate(
    element: WordCombination,
    size: int,
    letter_value: Callable[[Symbol], Optional[DomainMatrix]],
) -> DomainMatrix:
    """Σ coeff · product of letter values; a letter valued None kills its word."""
    total = DomainMatrix.zeros((size, size), QQ)
    for word, coeff in element:
        product = None
        for letter in word:
            value = letter_value(letter)
            if value is None:
                product = None
                break
            product = value if product is None else product * value
        if product is not None:
            total = total + product * to_qq(coeff)
    return total


def _point_letters(point: RepPoint) -> Callable[[Symbol], Optional[DomainMatrix]]:
    def value(letter: Symbol) -> Optional[DomainMatrix]:
        if letter.kind == ARROW:
            return point.embedded(letter.name)
        if letter.kind == VERTEX:
            return point.projector(letter.name)
        raise RepresentationError(f"cannot evaluate the letter {letter}")

    return value


def _check_quiver(element: WordCombination, point: RepPoint) -> None:
    if element.quiver != point.quiver:
        raise RepresentationError("element and point live on different quivers")


def eval_path(p: WordCombination, point: RepPoint) -> DomainMatrix:
    """The B-algebra homomorphism kQ -> Mat(|n|)."""
    _check_quiver(p, point)
    return evaluate(p, point.dim.total, _point_letters(point))


def trace_fn(f: WordCombination, point: RepPoint) -> Fraction:
    """f̂(τ) = tr of the evaluated necklace."""
    return trace(eval_path(f, point))


def induced_field(theta: Derivation, point: RepPoint) -> RepTangent:
    """θ̌ at τ: the block of eval(θ(a)) at every arrow a."""
    if theta.quiver != point.quiver:
        raise RepresentationError("derivation and point live on different quivers")
    return RepTangent(
        point.dim,
        {
            arrow.name: point.block_of(arrow.name, eval_path(theta.image(arrow.name), point))
            for arrow in point.quiver.arrows
        },
    )


def form_value(alpha: WordCombination, point: RepPoint, tangent: RepTangent) -> Fraction:
    """α̂(v): trace of the words of a 1-form with each db replaced by v_b."""
    _check_quiver(alpha, point)
    base = _point_letters(point)

    def value(letter: Symbol) -> Optional[DomainMatrix]:
        if letter.kind == DIFF:
            return tangent.embedded(letter.name)
        return base(letter)

    return trace(evaluate(alpha, point.dim.total, value))


def _dual_number(upper: DomainMatrix, corner: DomainMatrix) -> DomainMatrix:
    zero = DomainMatrix.zeros(upper.shape, QQ)
    return upper.hstack(corner).vstack(zero.hstack(upper))


def directional_value(f: WordCombination, point: RepPoint, tangent: RepTangent) -> Fraction:
    """d/dt f̂(τ + t v) at t = 0, computed with dual-number block matrices."""
    _check_quiver(f, point)
    size = point.dim.total
    zero = DomainMatrix.zeros((size, size), QQ)

    def value(letter: Symbol) -> Optional[DomainMatrix]:
        if letter.kind == ARROW:
            return _dual_number(point.embedded(letter.name), tangent.embedded(letter.name))
        if letter.kind == VERTEX:
            return _dual_number(point.projector(letter.name), zero)
        raise RepresentationError(f"cannot evaluate the letter {letter}")

    lifted = evaluate(f, 2 * size, value)
    return trace(lifted[0:size, size:2 * size])


def pairing_descent(
    alpha: WordCombination, theta: Derivation, point: RepPoint
) -> Tuple[Fraction, Fraction]:
    """(⟨α, θ⟩^ at τ, α̂(θ̌) at τ); the two agree."""

    return trace_fn(pair(alpha, theta), point), form_value(alpha, point, induced_field(theta, point))


def induced_bracket(
    pi, f: WordCombination, g: WordCombination, point: RepPoint
) -> Fraction:
    """{f̂, ĝ}(τ) for a bivector or a Poisson map."""
    m = pi if isinstance(pi, PoissonMap) else PoissonMap(pi)
    return trace_fn(function_bracket(m, f, g), point)


def jacobi_residue(pi, sample: Sequence[WordCombination], point: RepPoint) -> Fraction:
    """Largest |Σ_cyc {{f,g},h}| at τ over all triples of the sample."""
    m = pi if isinstance(pi, PoissonMap) else PoissonMap(pi)
    worst = Fraction(0)
    for f, g, h in itertools.combinations(sample, 3):
        cyclic = (
            function_bracket(m, function_bracket(m, f, g), h)
            + function_bracket(m, function_bracket(m, g, h), f)
            + function_bracket(m, function_bracket(m, h, f), g)
        )
        worst = max(worst, abs(trace_fn(cyclic, point)))
    return worst


def jacobi_check(pi, point: RepPoint, sample: Sequence[WordCombination]) -> Fraction:
    return jacobi_residue(pi, sample, point)


# coordinate bivectors


class CoordinateBivector:
    """Components and first derivatives of the bivector induced on matrix entries."""

    def __init__(self, pi, point: RepPoint):

        self.map = pi if isinstance(pi, PoissonMap) else PoissonMap(pi)
        self.point = point
        self.dim = point.dim
        self.coordinates = self.dim.coordinates()
        self.size = self.dim.total
        self.image = self.map(formal_form(point.quiver))

    def _marker_letters(self, source: Tuple[str, int, int], corner: Optional[Tuple[str, int, int]]):
        """Letter values with the marker of ``source`` set to its coordinate unit.

        With ``corner`` set, arrows become dual numbers carrying the unit
        tangent at that coordinate.
        """
        quiver = self.point.quiver
        name, i, j = source
        arrow = quiver.arrow(name)
        marker = unit_matrix(
            self.size, self.dim.offset(arrow.tail) + j, self.dim.offset(arrow.head) + i
        )
        zero = DomainMatrix.zeros((self.size, self.size), QQ)
        if corner is not None:
            direction = quiver.arrow(corner[0])
            tangent = unit_matrix(
                self.size,
                self.dim.offset(direction.head) + corner[1],
                self.dim.offset(direction.tail) + corner[2],
            )

        def value(letter: Symbol) -> Optional[DomainMatrix]:
            if letter.kind == MARKER:
                if letter.name != name:
                    return None
                return marker if corner is None else _dual_number(marker, zero)
            if corner is None:
                return _point_letters(self.point)(letter)
            if letter.kind == ARROW:
                extra = tangent if letter.name == corner[0] else zero
                return _dual_number(self.point.embedded(letter.name), extra)
            if letter.kind == VERTEX:
                return _dual_number(self.point.projector(letter.name), zero)
            raise RepresentationError(f"cannot evaluate the letter {letter}")

        return value

    def _row(self, source, corner=None) -> List[Fraction]:
        letters = self._marker_letters(source, corner)
        size = self.size if corner is None else 2 * self.size
        values = {}
        for name, poly in self.image.images.items():
            matrix = evaluate(poly, size, letters)
            if corner is not None:
                matrix = matrix[0:self.size, self.size:2 * self.size]
            values[name] = matrix
        row = []
        for name, i, j in self.coordinates:
            arrow = self.point.quiver.arrow(name)
            if name not in values:
                row.append(Fraction(0))
                continue
            element = values[name][self.dim.offset(arrow.head) + i, self.dim.offset(arrow.tail) + j]
            row.append(from_qq(element.element))
        return row

    def components(self) -> List[List[Fraction]]:
        return [self._row(source) for source in self.coordinates]

    def derivatives(self) -> List[List[List[Fraction]]]:
        """derivatives[l][i][j] = ∂_l π^{ij}."""
        return [
            [self._row(source, corner) for source in self.coordinates]
            for corner in self.coordinates
        ]


def coordinate_schouten(pi, rho, point: RepPoint) -> Dict[Tuple[int, int, int], Fraction]:
    """Nonzero components [π, ρ]^{ijk}, i < j < k, of the induced bivectors."""
    left, right = CoordinateBivector(pi, point), CoordinateBivector(rho, point)
    p, dp = left.components(), left.derivatives()
    r, dr = right.components(), right.derivatives()
    count = len(left.coordinates)
    result = {}
    for i, j, k in itertools.combinations(range(count), 3):
        total = Fraction(0)
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l in range(count):
                total += p[l][a] * dr[l][b][c] + r[l][a] * dp[l][b][c]
        if total:
            result[(i, j, k)] = total
    return result


def induced_schouten_check(pi, rho, point: RepPoint) -> Fraction:
    """First nonzero trivector component, or zero."""
    components = coordinate_schouten(pi, rho, point)
    return next(iter(components.values()), Fraction(0))


# Gibbons-Hermsen observables


@dataclass(frozen=True)
class GHObservable:
    """Ĥ_{k,α}(τ) = tr X^k v α w with X = τ_a, v = (-τ_x, τ_{y*}), w = (τ_{x*}; τ_y)."""

    degree: int
    alpha: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.alpha)
        if len(rows) != 2 or any(len(row) != 2 for row in rows):
            raise RepresentationError("the parameter matrix must be 2x2")
        if self.degree < 0:
            raise RepresentationError("observable degree must be nonnegative")
        object.__setattr__(self, "alpha", rows)

    def commutator(self, other: "GHObservable") -> Tuple[Tuple[Fraction, Fraction], ...]:
        """αβ - βα for the parameter matrices of two observables."""
        a, b = self.alpha, other.alpha
        return tuple(
            tuple(
                sum(a[i][k] * b[k][j] - b[i][k] * a[k][j] for k in range(2))
                for j in range(2)
            )
            for i in range(2)
        )

    def function(self, quiver: Quiver, names=("a", "x", "y")) -> PathPoly:
        """The necklace -α11 a^k x x* - α12 a^k x y + α21 a^k y* x* + α22 a^k y* y."""
        a, x, y = names
        power = quiver.idempotent(quiver.arrow(a).head)
        for _ in range(self.degree):
            power = power * quiver.path(a)
        xs, ys = quiver.dual_name(x), quiver.dual_name(y)
        (a11, a12), (a21, a22) = self.alpha
        return (
            power * quiver.path(x, xs) * (-a11)
            + power * quiver.path(x, y) * (-a12)
            + power * quiver.path(ys, xs) * a21
            + power * quiver.path(ys, y) * a22
        )


def gh_observable(observable: GHObservable, point: RepPoint, names=("a", "x", "y")) -> Fraction:
    """Evaluate Ĥ_{k,α} directly from the matrix blocks on 𝐧 = (n, 1)."""
    quiver = point.quiver
    a, x, y = names
    if point.dim.size(quiver.arrow(x).head) < 1 or point.dim.size(quiver.arrow(x).tail) != 1:
        raise RepresentationError("observables need the dimension vector (n, 1)")
    blocks = point.blocks
    n = blocks[a].shape[0]
    matrix_x = blocks[a]
    v = (-blocks[x]).hstack(blocks[quiver.dual_name(y)])
    w = blocks[quiver.dual_name(x)].vstack(blocks[y])
    alpha = matrix_from_rows(observable.alpha, (2, 2))
    power = DomainMatrix.eye(n, QQ)
    for _ in range(observable.degree):
        power = power * matrix_x
    return trace(power * v * alpha * w)


# random points and gauge checks


def random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(*NUMERATOR_RANGE), rng.randint(*DENOMINATOR_RANGE))


def random_point(dim: DimVector, rng: random.Random) -> RepPoint:
    """Entries n/d with n in [-9, 9] and d in [1, 4]."""
    rows = {}
    for arrow in dim.quiver.arrows:
        height, width = dim.shape(arrow.name)
        rows[arrow.name] = [[random_rational(rng) for _ in range(width)] for _ in range(height)]
    return RepPoint.from_rows(dim, rows)


def random_points(dim: DimVector, count: int, seed: int) -> List[RepPoint]:
    rng = random.Random(seed)
    return [random_point(dim, rng) for _ in range(count)]


def random_gauge(dim: DimVector, rng: random.Random) -> Dict[str, DomainMatrix]:
    """One random invertible rational matrix per vertex."""
    gauge = {}
    for vertex in dim.quiver.vertices:
        n = dim.size(vertex)
        while True:
            g = matrix_from_rows(
                [[random_rational(rng) for _ in range(n)] for _ in range(n)], (n, n)
            )
            if n == 0 or g.det() != 0:
                break
        gauge[vertex] = g
    return gauge


def check_invariance(
    f: WordCombination, point: RepPoint, count: int, rng: random.Random
) -> Tuple[bool, Fraction]:
    """Compare f̂ at τ with f̂ at random gauge transforms of τ."""
    value = trace_fn(f, point)
    worst = Fraction(0)
    for _ in range(count):
        moved = point.conjugate(random_gauge(point.dim, rng))
        worst = max(worst, abs(trace_fn(f, moved) - value))
    return worst == 0, worst


def tangent_from_rows(dim: DimVector, rows: Mapping[str, Sequence[Sequence[object]]]) -> RepTangent:
    return RepTangent(dim, {name: matrix_from_rows(r, dim.shape(name)) for name, r in rows.items()})


def basis_tangents(dim: DimVector) -> Iterable[RepTangent]:
    """Unit tangent vectors, one per matrix entry."""
    for name, i, j in dim.coordinates():
        blocks = {
            arrow.name: DomainMatrix.zeros(dim.shape(arrow.name), QQ)
            for arrow in dim.quiver.arrows
        }
        blocks[name] = matrix_from_entries({(i, j): 1}, dim.shape(name))
        yield RepTangent(dim, blocks)
