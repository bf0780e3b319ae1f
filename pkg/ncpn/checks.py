"""
Named verification checks.

Every check takes resolved arguments and the run options and returns a
:class:`Report`; the verdict is a pass only when every residue vanishes
exactly.  Family and point sweeps go through :mod:`ncpn.tasks`.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

from .exceptions import CheckUsageError, RegistryError
from .forms import differential, dr_normalize
from .pn import (
    Bivector,
    PoissonMap,
    RegularEndo,
    canonical_symplectic,
    cm_necklace_bracket,
    function_bracket,
    hierarchy,
    is_double_poisson,
    lenard_check,
)
from .polyvec import PolyVector, grade_of, schouten
from .quiver import WordCombination
from .registry import builtin, cm_pi, cm_quiver
from .representation import DimVector, induced_schouten_check, random_points
from .sweeps import SweepContext, encode
from .tasks import run_sweep

logger = logging.getLogger(__name__)

SCHEMA = 1

DEFAULT_SAMPLES = {
    "cm": ("I1", "I2", "I3", "J1", "J2", "J3"),
    "gh": ("I1", "I2", "I2_0", "I2_1", "J1", "J2", "J2_1", "J2_2"),
}
DEFAULT_DIMS = {"cm": {"o": 2}, "gh": {"1": 2, "2": 1}}
TABLE_RANGE = range(1, 5)


class Argument(NamedTuple):
    name: str
    value: Any


@dataclass
class Options:
    bound: int = 3
    depth: int = 4
    seed: int = 0
    points: int = 20
    conjugations: int = 5
    chunk_size: int = 64
    dim: Optional[Dict[str, int]] = None
    chain: str = "I"
    links: int = 4
    timing: bool = True
    output_format: str = "text"


@dataclass
class Report:
    check: str
    params: Dict[str, Any]
    verdict: bool
    residue: Optional[str] = None
    elapsed_ms: Optional[int] = None
    details: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def schema(self) -> int:
        return SCHEMA

    def as_text(self) -> str:
        arguments = " ".join(self.params.get("arguments", []))
        head = f"{self.check} {arguments}".strip()
        lines = [f"{head}: {'pass' if self.verdict else 'FAIL'}"]
        for detail in self.details:
            status = "ok" if detail.get("verdict", True) else "FAIL"
            lines.append(f"  {detail['name']}: {status}" + (
                f"  {detail['value']}" if detail.get("value") is not None else ""
            ))
        if self.residue is not None:
            lines.append(f"  residue: {self.residue}")
        if self.elapsed_ms is not None:
            lines.append(f"  elapsed: {self.elapsed_ms} ms")
        return "\n".join(lines)


CheckFn = Callable[[List[Argument], Options], Tuple[bool, Optional[str], List[Dict[str, Any]]]]

CHECKS: Dict[str, Tuple[CheckFn, int, int, Tuple[str, ...]]] = {}


def check(name: str, arity: Tuple[int, int], params: Tuple[str, ...] = ()):
    """Register a check with its accepted argument counts and recorded options."""

    def register(fn: CheckFn) -> CheckFn:
        CHECKS[name] = (fn, arity[0], arity[1], params)
        return fn

    return register


def run_check(name: str, arguments: List[Argument], options: Options) -> Report:
    if name not in CHECKS:
        raise CheckUsageError(f"unknown check {name!r}; known: {', '.join(sorted(CHECKS))}")
    fn, low, high, recorded = CHECKS[name]
    if not low <= len(arguments) <= high:
        expected = str(low) if low == high else f"{low} to {high}"
        raise CheckUsageError(f"check {name} takes {expected} arguments, got {len(arguments)}")

    start = time.perf_counter()
    verdict, residue, details = fn(arguments, options)
    elapsed = int((time.perf_counter() - start) * 1000)

    params = {"arguments": [a.name for a in arguments]}
    params.update({key: getattr(options, key) for key in recorded})
    logger.info(f"Check {name} {params['arguments']}: {'pass' if verdict else 'fail'} in {elapsed} ms")
    return Report(
        check=name,
        params=params,
        verdict=verdict,
        residue=residue,
        elapsed_ms=elapsed if options.timing else None,
        details=details,
    )


# argument coercion


def as_bivector(argument: Argument) -> Bivector:
    value = argument.value
    if isinstance(value, Bivector):
        return value
    if isinstance(value, WordCombination):
        if value.is_zero:
            return Bivector.zero(value.quiver)
        if isinstance(value, PolyVector) and grade_of(value) == 2:
            return Bivector.from_vector(value)
    raise CheckUsageError(f"{argument.name} is not a bivector")


def as_endo(argument: Argument) -> RegularEndo:
    if isinstance(argument.value, RegularEndo):
        return argument.value
    raise CheckUsageError(f"{argument.name} is not a (1,1)-tensor")


def as_polyvector(argument: Argument) -> PolyVector:
    value = argument.value
    if isinstance(value, Bivector):
        return value.vector
    if isinstance(value, PolyVector):
        return value
    raise CheckUsageError(f"{argument.name} is not a polyvector")


def system_of(argument: Argument) -> str:
    system, dot, _ = argument.name.partition(".")
    if not dot or system not in DEFAULT_SAMPLES:
        raise CheckUsageError(
            f"{argument.name}: function families are only known for built-in systems"
        )
    return system


def _sweep(kind: str, context: SweepContext, options: Options) -> Dict[str, Any]:
    result = run_sweep(kind, encode(context), options.chunk_size)
    verdict = result["status"] == "success" and result["failure"] is None
    detail = {"name": kind, "verdict": verdict, "value": None}
    if result["status"] == "error":
        detail["value"] = result["message"]
    elif result["failure"] is not None:
        detail["value"] = f"item {result['failure']}: {result['residue']}"
    else:
        detail["value"] = f"{result['checked']} items"
    return detail


def _verdict(details: List[Dict[str, Any]]) -> Tuple[bool, Optional[str], List[Dict[str, Any]]]:
    failed = next((d for d in details if not d["verdict"]), None)
    return failed is None, None if failed is None else str(failed["value"]), details


# symbolic checks


@check("poisson", (1, 1))
def check_poisson(arguments: List[Argument], options: Options):
    ok, residue = is_double_poisson(as_bivector(arguments[0]))
    return ok, None if ok else str(residue), []


@check("schouten", (2, 2))
def check_schouten(arguments: List[Argument], options: Options):
    residue = schouten(as_polyvector(arguments[0]), as_polyvector(arguments[1]))
    return residue.is_zero, None if residue.is_zero else str(residue), []


@check("compat", (2, 2), ("bound", "chunk_size"))
def check_compat(arguments: List[Argument], options: Options):
    """Schouten-commuting bivectors, or algebraic and differential compatibility of (π, N)."""
    if isinstance(arguments[1].value, RegularEndo):
        pi, endo = as_bivector(arguments[0]), as_endo(arguments[1])
        context = SweepContext(pi.quiver, options.bound, pi=pi, endo=endo)
        return _verdict([
            _sweep("algebraic", context, options),
            _sweep("concomitant", context, options),
        ])
    return check_schouten(arguments, options)


@check("torsion", (1, 1), ("bound", "chunk_size"))
def check_torsion(arguments: List[Argument], options: Options):
    endo = as_endo(arguments[0])
    context = SweepContext(endo.quiver, options.bound, endo=endo)
    return _verdict([_sweep("torsion", context, options)])


@check("ksm", (2, 2), ("bound", "chunk_size"))
def check_ksm(arguments: List[Argument], options: Options):
    pi, endo = as_bivector(arguments[0]), as_endo(arguments[1])
    context = SweepContext(pi.quiver, options.bound, pi=pi, endo=endo)
    return _verdict([_sweep("ksm", context, options)])


@check("hierarchy", (2, 2), ("depth",))
def check_hierarchy(arguments: List[Argument], options: Options):
    """π_0..π_depth, each double Poisson and pairwise Schouten-commuting."""
    members = hierarchy(as_bivector(arguments[0]), as_endo(arguments[1]), options.depth)
    details = [
        {"name": f"pi{j}", "verdict": is_double_poisson(member)[0], "value": str(member)}
        for j, member in enumerate(members)
    ]
    for j, first in enumerate(members):
        for l in range(j + 1, len(members)):
            residue = schouten(first.vector, members[l].vector)
            details.append({
                "name": f"[pi{j}, pi{l}]",
                "verdict": residue.is_zero,
                "value": None if residue.is_zero else str(residue),
            })
    ok = all(d["verdict"] for d in details)
    failed = next((d for d in details if not d["verdict"]), None)
    return ok, None if ok else f"{failed['name']}: {failed['value']}", details


def chain_functions(system: str, chain: str, links: int) -> List[WordCombination]:
    """The chain members f_s, ..., f_{links+1} of a built-in family."""
    prefix = f"{system}.{chain}_" if chain[-1:].isdigit() else f"{system}.{chain}"
    try:
        builtin(f"{prefix}0")
        start = 0
    except RegistryError:
        start = 1
    return [builtin(f"{prefix}{k}") for k in range(start, links + 2)]


@check("lenard", (2, 2), ("chain", "links"))
def check_lenard(arguments: List[Argument], options: Options):
    lo, hi = as_bivector(arguments[0]), as_bivector(arguments[1])
    functions = chain_functions(system_of(arguments[0]), options.chain, options.links)
    ok, residues = lenard_check(PoissonMap(lo), PoissonMap(hi), functions)
    details = [
        {
            "name": f"link {options.chain} {i}",
            "verdict": residue.is_zero,
            "value": str(PoissonMap(hi)(differential(f))),
        }
        for i, (f, residue) in enumerate(zip(functions, residues))
    ]
    first = next((r for r in residues if not r.is_zero), None)
    return ok, None if first is None else str(first), details


# matrix checks


def _dim(argument: Argument, options: Options) -> Dict[str, int]:
    if options.dim is not None:
        return options.dim
    return DEFAULT_DIMS[system_of(argument)]


def _samples(argument: Argument, extra: List[Argument]) -> Tuple[WordCombination, ...]:
    if extra:
        return tuple(a.value for a in extra)
    system = system_of(argument)
    return tuple(builtin(f"{system}.{name}") for name in DEFAULT_SAMPLES[system])


@check("jacobi", (1, 16), ("dim", "seed", "points", "chunk_size"))
def check_jacobi(arguments: List[Argument], options: Options):
    pi = as_bivector(arguments[0])
    context = SweepContext(
        pi.quiver,
        pi=pi,
        functions=_samples(arguments[0], arguments[1:]),
        dim=_dim(arguments[0], options),
        seed=options.seed,
        points=options.points,
    )
    return _verdict([_sweep("jacobi", context, options)])


@check("descent", (1, 16), ("dim", "seed", "points", "conjugations", "chunk_size"))
def check_descent(arguments: List[Argument], options: Options):
    """Pairing descent, gauge invariance and, on framed quivers, the observable algebra."""
    pi = as_bivector(arguments[0])
    context = SweepContext(
        pi.quiver,
        pi=pi,
        functions=_samples(arguments[0], arguments[1:]),
        dim=_dim(arguments[0], options),
        seed=options.seed,
        points=options.points,
        conjugations=options.conjugations,
    )
    details = [_sweep("descent", context, options), _sweep("invariance", context, options)]
    framed = all(pi.quiver.has_arrow(name) for name in ("a", "x", "y", "x^", "y^"))
    # the observable algebra closes for the canonical bracket only
    if framed and pi == canonical_symplectic(pi.quiver).poisson_bivector():
        details.append(_sweep("observables", context, options))
    return _verdict(details)


@check("induced", (2, 2), ("dim", "seed", "points"))
def check_induced(arguments: List[Argument], options: Options):
    """Coordinate Schouten bracket of the induced bivectors at random points."""
    pi, rho = as_bivector(arguments[0]), as_bivector(arguments[1])
    dim = DimVector.from_mapping(pi.quiver, _dim(arguments[0], options))
    details = []
    for index, point in enumerate(random_points(dim, options.points, options.seed)):
        residue = induced_schouten_check(pi, rho, point)
        details.append({"name": f"point {index}", "verdict": residue == 0, "value": str(residue)})
    return _verdict(details)


@check("table", (0, 0), ("depth",))
def check_table(arguments: List[Argument], options: Options):
    """The Calogero-Moser bracket table, by necklace derivatives and by pairing."""
    quiver = cm_quiver()
    unit = dr_normalize(quiver.unit())
    details = []
    for m in range(options.depth + 1):
        pi_map = PoissonMap(cm_pi(m))
        for k in TABLE_RANGE:
            for l in TABLE_RANGE:
                n = k + l + m - 2
                power = unit if n == 0 else dr_normalize(builtin(f"cm.I{n}").scale(n))
                cases = [
                    (f"{{I{k},I{l}}}_{m}", builtin(f"cm.I{k}"), builtin(f"cm.I{l}"), power.scale(0)),
                    (f"{{J{l},I{k}}}_{m}", builtin(f"cm.J{l}"), builtin(f"cm.I{k}"), power),
                    (
                        f"{{J{k},J{l}}}_{m}",
                        builtin(f"cm.J{k}"),
                        builtin(f"cm.J{l}"),
                        dr_normalize(builtin(f"cm.J{n}")).scale(l - k) if n else power.scale(0),
                    ),
                ]
                for name, f, g, expected in cases:
                    by_necklace = cm_necklace_bracket(f, g, m)
                    by_pairing = function_bracket(pi_map, f, g)
                    ok = by_necklace == expected and by_pairing == expected
                    details.append({"name": name, "verdict": ok, "value": str(by_pairing)})
    return _verdict(details)
