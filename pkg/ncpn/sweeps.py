"""
Bounded-family and random-point sweeps.

A sweep is described by a JSON-friendly payload (quiver and structures as
canonical text) so that chunks of it can be evaluated by Celery workers;
every chunk re-parses the payload and evaluates a slice of the items.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .forms import Derivation, FormWord
from .grammar import parse_expression, parse_quiver
from .pn import (
    Bivector,
    PoissonMap,
    RegularEndo,
    algebraic_compat_residue,
    derivation_family,
    form_family,
    function_bracket,
    ksm_residue,
    magri_morosi,
    torsion,
)
from .quiver import DoubledQuiver, Quiver, WordCombination, double
from .representation import (
    DimVector,
    GHObservable,
    check_invariance,
    gh_observable,
    jacobi_residue,
    pairing_descent,
    random_points,
    trace_fn,
)

logger = logging.getLogger(__name__)

FAMILY_KINDS = ("torsion", "algebraic", "concomitant", "ksm")
POINT_KINDS = ("jacobi", "descent", "invariance", "observables")

DESCENT_PAIRS = 10
OBSERVABLE_DEGREE = 4


@dataclass
class SweepContext:
    quiver: Quiver
    bound: int = 3
    pi: Optional[Bivector] = None
    endo: Optional[RegularEndo] = None
    functions: Tuple[WordCombination, ...] = ()
    dim: Optional[Dict[str, int]] = None
    seed: int = 0
    points: int = 20
    conjugations: int = 5
    _cache: Dict[str, list] = field(default_factory=dict, repr=False)

    @property
    def poisson_map(self) -> PoissonMap:
        return PoissonMap(self.pi)

    def derivations(self, bound: Optional[int] = None) -> List[Derivation]:
        bound = self.bound if bound is None else bound
        key = f"derivations{bound}"
        if key not in self._cache:
            self._cache[key] = derivation_family(self.quiver, bound)
        return self._cache[key]

    def forms(self, bound: Optional[int] = None) -> List[FormWord]:
        bound = self.bound if bound is None else bound
        key = f"forms{bound}"
        if key not in self._cache:
            self._cache[key] = form_family(self.quiver, bound)
        return self._cache[key]

    def sample_points(self):
        key = "points"
        if key not in self._cache:
            dim = DimVector.from_mapping(self.quiver, self.dim)
            self._cache[key] = random_points(dim, self.points, self.seed)
        return self._cache[key]


# payloads


def encode(context: SweepContext) -> dict:
    quiver = context.quiver
    return {
        "quiver": str(quiver),
        "doubled": isinstance(quiver, DoubledQuiver),
        "bound": context.bound,
        "pi": None if context.pi is None else str(context.pi),
        "endo": None
        if context.endo is None
        else {name: str(form) for name, form in context.endo.images.items()},
        "functions": [str(f) for f in context.functions],
        "dim": context.dim,
        "seed": context.seed,
        "points": context.points,
        "conjugations": context.conjugations,
    }


def decode(payload: dict) -> SweepContext:
    quiver = parse_quiver(payload["quiver"])
    if payload.get("doubled"):
        quiver = double(quiver)
    pi = None
    if payload.get("pi") is not None:
        pi = _bivector(payload["pi"], quiver)
    endo = None
    if payload.get("endo") is not None:
        endo = RegularEndo(
            quiver,
            {name: parse_expression(text, quiver) for name, text in payload["endo"].items()},
        )
    return SweepContext(
        quiver=quiver,
        bound=payload.get("bound", 3),
        pi=pi,
        endo=endo,
        functions=tuple(parse_expression(text, quiver) for text in payload.get("functions", ())),
        dim=payload.get("dim"),
        seed=payload.get("seed", 0),
        points=payload.get("points", 20),
        conjugations=payload.get("conjugations", 5),
    )


def _bivector(text: str, quiver: Quiver) -> Bivector:
    value = parse_expression(text, quiver)
    if value.is_zero:
        return Bivector.zero(quiver)
    return Bivector.from_vector(value)


# items


def items(kind: str, context: SweepContext) -> List[tuple]:
    """The index tuples a sweep of ``kind`` runs over, in report order."""
    if kind == "torsion":
        return list(itertools.combinations(range(len(context.derivations())), 2))
    if kind == "algebraic":
        return [(i,) for i in range(len(context.forms()))]
    if kind == "concomitant":
        return list(itertools.combinations(range(len(context.forms())), 2))
    if kind == "ksm":
        count = len(context.forms())
        return [
            (i, j, t)
            for i in range(count)
            for j in range(count)
            for t in range(len(context.derivations()))
        ]
    if kind in POINT_KINDS:
        return [(i,) for i in range(context.points)]
    raise ValueError(f"unknown sweep {kind!r}")


def residue(kind: str, context: SweepContext, item: tuple):
    """The quantity that must vanish at one item."""
    if kind == "torsion":
        family = context.derivations()
        return torsion(context.endo, family[item[0]], family[item[1]])
    if kind == "algebraic":
        return algebraic_compat_residue(context.poisson_map, context.endo, context.forms()[item[0]])
    if kind == "concomitant":
        forms = context.forms()
        return magri_morosi(context.poisson_map, context.endo, forms[item[0]], forms[item[1]])
    if kind == "ksm":
        forms = context.forms()
        return ksm_residue(
            context.poisson_map,
            context.endo,
            forms[item[0]],
            forms[item[1]],
            context.derivations()[item[2]],
        )
    point = context.sample_points()[item[0]]
    if kind == "jacobi":
        return jacobi_residue(context.pi, context.functions, point)
    if kind == "descent":
        return _descent_residue(context, item[0], point)
    if kind == "invariance":
        rng = random.Random(context.seed * 7919 + item[0])
        return max(
            (check_invariance(f, point, context.conjugations, rng)[1] for f in context.functions),
            default=Fraction(0),
        )
    if kind == "observables":
        return _observable_residue(context, item[0], point)
    raise ValueError(f"unknown sweep {kind!r}")


def _descent_residue(context: SweepContext, index: int, point) -> Fraction:
    """|⟨α,θ⟩^ - α̂(θ̌)| over seeded (α, θ) pairs from the bound one families."""
    rng = random.Random(context.seed * 104729 + index)
    forms, derivations = context.forms(1), context.derivations(1)
    worst = Fraction(0)
    for _ in range(DESCENT_PAIRS):
        alpha, theta = rng.choice(forms), rng.choice(derivations)
        lhs, rhs = pairing_descent(alpha, theta, point)
        worst = max(worst, abs(lhs - rhs))
    return worst


def observable_pairs(rng: random.Random) -> List[Tuple[GHObservable, GHObservable]]:
    pairs = []
    for total in range(OBSERVABLE_DEGREE + 1):
        for k in range(total + 1):
            alpha = tuple(tuple(Fraction(rng.randint(-3, 3)) for _ in range(2)) for _ in range(2))
            beta = tuple(tuple(Fraction(rng.randint(-3, 3)) for _ in range(2)) for _ in range(2))
            pairs.append((GHObservable(k, alpha), GHObservable(total - k, beta)))
    return pairs


def _observable_residue(context: SweepContext, index: int, point) -> Fraction:
    """|{Ĥ_{k,α}, Ĥ_{l,β}} - Ĥ_{k+l,[β,α]}| at one point, for k + l <= 4.

    With {f,g} = ⟨dg, π̃(df)⟩ the observables close on the reversed
    commutator: {Ĥ_{k,α}, Ĥ_{l,β}} = Ĥ_{k+l,[β,α]} = -Ĥ_{k+l,[α,β]}.
    """
    rng = random.Random(context.seed * 15485863 + index)
    m = context.poisson_map
    worst = Fraction(0)
    for left, right in observable_pairs(rng):
        bracket = trace_fn(
            function_bracket(m, left.function(context.quiver), right.function(context.quiver)),
            point,
        )
        expected = GHObservable(left.degree + right.degree, right.commutator(left))
        worst = max(worst, abs(bracket - gh_observable(expected, point)))
    return worst


def run_chunk(kind: str, payload: dict, start: int, stop: int) -> dict:
    """Evaluate items[start:stop]; report the first nonzero residue."""
    context = decode(payload)
    chunk = items(kind, context)[start:stop]
    for item in chunk:
        value = residue(kind, context, item)
        if _nonzero(value):
            logger.info(f"Sweep {kind} fails at item {item}")
            return {"checked": len(chunk), "failure": list(item), "residue": str(value)}
    return {"checked": len(chunk), "failure": None, "residue": None}


def _nonzero(value) -> bool:
    if isinstance(value, Fraction):
        return value != 0
    return not value.is_zero


def chunk_bounds(total: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]
