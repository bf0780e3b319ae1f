"""
Sessions and batch scripts.

A session holds the loaded quiver, the names bound by ``let`` and the run
options; names of the form ``system.entry`` fall through to the built-in
registry and anything else is parsed as an expression on the loaded quiver.
"""
import logging
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .checks import Argument, Options, Report, run_check
from .exceptions import CheckUsageError, ExpressionError, RegistryError
from .grammar import CheckStatement, LetStatement, parse_expression, parse_quiver, parse_script
from .quiver import DoubledQuiver, Quiver, WordCombination, double
from .registry import builtin, system_quiver

logger = logging.getLogger(__name__)

OPTION_TYPES = {
    "bound": int,
    "depth": int,
    "seed": int,
    "points": int,
    "conjugations": int,
    "links": int,
    "chain": str,
}


def parse_dim(text: str, quiver: Quiver) -> Dict[str, int]:
    """``2,1`` in vertex order, or ``o=2`` style pairs."""
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if all("=" in part for part in parts):
        return {key: int(value) for key, value in (part.split("=", 1) for part in parts)}
    if len(parts) != len(quiver.vertices):
        raise CheckUsageError(
            f"dimension vector {text!r} needs {len(quiver.vertices)} entries"
        )
    return dict(zip(quiver.vertices, (int(part) for part in parts)))


class Session:
    """The loaded quiver, named values and options of one run."""

    def __init__(self, options: Optional[Options] = None):
        self.options = options or Options()
        self.quiver: Optional[DoubledQuiver] = None
        self.values: Dict[str, object] = {}

    def load_quiver(self, source: Union[str, Quiver]) -> DoubledQuiver:
        """Load a quiver (file text or object) and work on its double."""
        quiver = parse_quiver(source) if isinstance(source, str) else source
        self.quiver = quiver if isinstance(quiver, DoubledQuiver) else double(quiver)
        logger.info(f"Loaded quiver {quiver.name!r} with {len(self.quiver.arrows)} arrows")
        return self.quiver

    def use_builtin_quiver(self, name: str) -> DoubledQuiver:
        return self.load_quiver(system_quiver(name))

    def define(self, name: str, value) -> None:
        if name in self.values:
            raise ExpressionError(f"{name!r} is already defined")
        quiver = getattr(value, "quiver", None)
        if self.quiver is not None and quiver is not None and quiver.vertices != self.quiver.vertices:
            raise ExpressionError(f"{name!r} does not live on the loaded quiver")
        self.values[name] = value

    def evaluate(self, source: str) -> WordCombination:
        if self.quiver is None:
            raise ExpressionError("no quiver loaded; declare one or use --quiver")
        return parse_expression(source, self.quiver)

    def resolve(self, name: str):
        if name in self.values:
            return self.values[name]
        if "." in name and " " not in name:
            return builtin(name)
        return self.evaluate(name)

    def argument(self, name: str) -> Argument:
        return Argument(name, self.resolve(name))

    def run_check(self, name: str, arguments: Iterable[str]) -> Report:
        return run_check(name, [self.argument(a) for a in arguments], self.options)


class Script:
    """A parsed batch script; every statement is bound before any check runs."""

    def __init__(self, statements: List[object]):
        self.statements = statements

    @classmethod
    def from_source(cls, source: str) -> "Script":
        return cls(parse_script(source))

    def compile(self, session: Session) -> List[Tuple[CheckStatement, List[Argument], Options]]:
        compiled = []
        for statement in self.statements:
            if isinstance(statement, Quiver):
                session.load_quiver(statement)
            elif isinstance(statement, LetStatement):
                source = statement.source
                value = builtin(source.name) if hasattr(source, "name") else session.evaluate(source)
                session.define(statement.name, value)
            elif isinstance(statement, CheckStatement):
                arguments = [session.argument(name) for name in statement.arguments]
                compiled.append((statement, arguments, self._options(statement, session)))
        return compiled

    def _options(self, statement: CheckStatement, session: Session) -> Options:
        values = dict(vars(session.options))
        for option in statement.options:
            key = option.key.replace("-", "_")
            if key == "dim":
                quiver = session.quiver or system_quiver(statement.arguments[0])
                values["dim"] = parse_dim(option.value or "", quiver)
            elif key == "no_timing":
                values["timing"] = False
            elif key in OPTION_TYPES and option.value is not None:
                values[key] = OPTION_TYPES[key](option.value)
            else:
                raise CheckUsageError(f"unknown option --{option.key} in check {statement.name}")
        return Options(**values)

    def run(self, session: Session) -> List[Report]:
        try:
            compiled = self.compile(session)
        except RegistryError as exc:
            raise ExpressionError(str(exc)) from exc
        return [run_check(s.name, arguments, options) for s, arguments, options in compiled]
