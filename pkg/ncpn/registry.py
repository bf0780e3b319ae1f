"""
Built-in systems: Calogero-Moser on the one-loop double (``cm.*``) and
Gibbons-Hermsen on the double of a loop with a pair of legs (``gh.*``).

Indexed families take their index as a suffix: ``cm.I3``, ``cm.pi2``,
``gh.I2_0``, ``gh.J2_4``.
"""
import logging
import re
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Tuple

from .exceptions import RegistryError
from .grammar import parse_expression
from .pn import (
    Bivector,
    Commutator,
    RegularEndo,
    alt_cm_endo,
    canonical_symplectic,
    complete_lift,
)
from .quiver import Arrow, DoubledQuiver, Quiver, double

logger = logging.getLogger(__name__)

CM_LAMBDA = "a^ a d a"
GH_LAMBDA = "a^ a d a + x^ a d x - y a d y^"


@lru_cache(maxsize=None)
def cm_base() -> Quiver:
    return Quiver("cm", ("o",), (Arrow("a", "o", "o"),))


@lru_cache(maxsize=None)
def cm_quiver() -> DoubledQuiver:
    return double(cm_base())


@lru_cache(maxsize=None)
def gh_quiver() -> DoubledQuiver:
    base = Quiver(
        "gh",
        ("1", "2"),
        (Arrow("a", "1", "1"), Arrow("x", "2", "1"), Arrow("y", "1", "2")),
    )
    return double(base)


def _power(letter: str, k: int) -> str:
    return " ".join([letter] * k)


def _commutator(quiver, left: str, first: str, right: str, second: str, coeff=1) -> Commutator:
    """coeff · [left ∂_first, right ∂_second], with "1" for a bare ∂."""
    return Commutator(
        Fraction(coeff),
        parse_expression(left, quiver),
        first,
        parse_expression(right, quiver),
        second,
    )


# Calogero-Moser


def cm_pi(m: int) -> Bivector:
    """π_m = [a^m ∂_{a*}, ∂_a] + Σ_{i=1..m} [a* a^{m-i} ∂_{a*}, a^{i-1} ∂_{a*}]."""
    quiver = cm_quiver()
    if m == 0:
        return canonical_symplectic(quiver).poisson_bivector()
    commutators = [_commutator(quiver, _power("a", m), "a^", "1", "a")]
    for i in range(1, m + 1):
        commutators.append(
            _commutator(
                quiver,
                f"a^ {_power('a', m - i)}",
                "a^",
                _power("a", i - 1) or "1",
                "a^",
            )
        )
    return Bivector(quiver, commutators)


def cm_pi1_alt() -> Bivector:
    quiver = cm_quiver()
    return Bivector(
        quiver,
        [
            _commutator(quiver, "a^", "a^", "1", "a"),
            _commutator(quiver, "a", "a", "1", "a"),
        ],
    )


def cm_recursion() -> RegularEndo:
    """L on the one-loop quiver, L*(d a) = a d a."""
    quiver = cm_base()
    return RegularEndo(quiver, {"a": parse_expression("a d a", quiver)})


def cm_lift() -> RegularEndo:
    quiver = cm_quiver()
    return complete_lift(quiver, parse_expression(CM_LAMBDA, quiver))


def _scaled_power(letter: str, k: int):
    return parse_expression(f"1/{k} {_power(letter, k)}", cm_quiver())


def _mixed(first: str, k: int, last: str):
    return parse_expression(f"{_power(first, k - 1)} {last}".strip(), cm_quiver())


# Gibbons-Hermsen


def gh_pi0() -> Bivector:
    return canonical_symplectic(gh_quiver()).poisson_bivector()


def gh_pi1() -> Bivector:
    quiver = gh_quiver()
    return Bivector(
        quiver,
        [
            _commutator(quiver, "a", "a^", "1", "a"),
            _commutator(quiver, "a^", "a^", "1", "a^"),
            _commutator(quiver, "a", "x^", "1", "x"),
            _commutator(quiver, "x^", "a^", "1", "x^"),
            _commutator(quiver, "1", "y^", "a", "y"),
            _commutator(quiver, "y", "a^", "1", "y"),
        ],
    )


def gh_lift() -> RegularEndo:
    quiver = gh_quiver()
    return complete_lift(quiver, parse_expression(GH_LAMBDA, quiver))


FRAMING = "(x x^ + y^ y)"


def _gh(text: str):
    return parse_expression(text, gh_quiver())


_INDEXED: List[Tuple[str, str, int, Callable[[int], object]]] = [
    # (system, pattern, smallest index, builder)
    ("cm", r"pi(\d+)", 0, cm_pi),
    ("cm", r"I(\d+)", 1, lambda k: _scaled_power("a", k)),
    ("cm", r"J(\d+)", 1, lambda k: _mixed("a", k, "a^")),
    ("cm", r"H(\d+)", 1, lambda k: _scaled_power("a^", k)),
    ("cm", r"K(\d+)", 1, lambda k: _mixed("a^", k, "a")),
    ("gh", r"I(\d+)", 1, lambda k: _gh(f"1/{k} {_power('a', k)}")),
    ("gh", r"I2_(\d+)", 0, lambda k: _gh(f"{_power('a', k)} {FRAMING}")),
    ("gh", r"J(\d+)", 1, lambda k: _gh(f"{_power('a', k - 1)} a^")),
    ("gh", r"J2_(\d+)", 1, lambda k: _gh(f"{_power('a', k - 1)} a^ {FRAMING}")),
]

_NAMED: Dict[str, Callable[[], object]] = {
    "cm.quiver": cm_quiver,
    "cm.N": cm_lift,
    "cm.N_alt": lambda: alt_cm_endo(cm_quiver()),
    "cm.L": cm_recursion,
    "cm.pi1_alt": cm_pi1_alt,
    "gh.quiver": gh_quiver,
    "gh.pi0": gh_pi0,
    "gh.pi1": gh_pi1,
    "gh.N": gh_lift,
}


@lru_cache(maxsize=None)
def builtin(name: str):
    """Look up a built-in quiver, bivector, endomorphism or function."""
    if name in _NAMED:
        logger.debug(f"Building built-in {name}")
        return _NAMED[name]()
    system, _, key = name.partition(".")
    for owner, pattern, smallest, build in _INDEXED:
        match = re.fullmatch(pattern, key)
        if owner == system and match:
            index = int(match.group(1))
            if index < smallest:
                raise RegistryError(f"{name}: index must be at least {smallest}")
            logger.debug(f"Building built-in {name}")
            return build(index)
    raise RegistryError(f"unknown built-in {name!r}; known: {', '.join(names())}")


def names() -> List[str]:
    indexed = [
        f"{system}." + pattern.replace(r"(\d+)", "<n>") for system, pattern, _, _ in _INDEXED
    ]
    return sorted(list(_NAMED) + indexed)


def system_quiver(name: str) -> DoubledQuiver:
    """The quiver a built-in lives on, from its system prefix."""
    system = name.partition(".")[0]
    if system == "cm":
        return cm_quiver()
    if system == "gh":
        return gh_quiver()
    raise RegistryError(f"unknown system {system!r}")
