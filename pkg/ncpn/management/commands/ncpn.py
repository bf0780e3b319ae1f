import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from ncpn.checks import CHECKS, Options, as_bivector, as_polyvector
from ncpn.conf import engine_setting
from ncpn.exceptions import CheckUsageError, ExpressionError, NcpnError, RegistryError
from ncpn.forms import FormWord, dr_normalize
from ncpn.pn import Bivector, PoissonMap, function_bracket
from ncpn.polyvec import PolyVector, schouten
from ncpn.registry import system_quiver
from ncpn.representation import DimVector, random_points, trace_fn
from ncpn.serializers import ReportSerializer, RepPointSerializer, render_json, terms_data
from ncpn.session import Script, Session, parse_dim

logger = logging.getLogger(__name__)

USAGE = 2
FAILED = 1


class Command(BaseCommand):
    help = "Build and verify noncommutative Poisson-Nijenhuis structures on quivers"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)

        for name in ("parse", "normalize"):
            sub = subparsers.add_parser(name, help=f"{name} an expression")
            sub.add_argument("expression")
            self._common(sub)

        sub = subparsers.add_parser("schouten", help="Schouten bracket of two polyvectors")
        sub.add_argument("left")
        sub.add_argument("right")
        self._common(sub)

        sub = subparsers.add_parser("check", help="run a named verification")
        sub.add_argument("name", choices=sorted(CHECKS))
        sub.add_argument("arguments", nargs="*")
        self._common(sub)

        sub = subparsers.add_parser("hierarchy", help="the hierarchy pi_0 .. pi_depth")
        sub.add_argument("bivector")
        sub.add_argument("endo")
        self._common(sub)

        sub = subparsers.add_parser("rep-eval", help="evaluate a function at a representation")
        sub.add_argument("function")
        sub.add_argument("--point", help="rep-point JSON file; random points otherwise")
        sub.add_argument("--bracket", nargs=2, metavar=("BIVECTOR", "OTHER"))
        self._common(sub)

        sub = subparsers.add_parser("run", help="run a batch script")
        sub.add_argument("script")
        self._common(sub)

    def _common(self, parser):
        parser.add_argument("--quiver", help="quiver file, or a built-in system (cm, gh)")
        parser.add_argument("--bound", type=int, default=engine_setting("BOUND"))
        parser.add_argument("--depth", type=int, default=engine_setting("DEPTH"))
        parser.add_argument("--seed", type=int, default=engine_setting("SEED"))
        parser.add_argument("--points", type=int, default=engine_setting("POINTS"))
        parser.add_argument("--chain", default="I")
        parser.add_argument("--links", type=int, default=engine_setting("LINKS"))
        parser.add_argument("--dim", help="dimension vector, e.g. 2,1")
        parser.add_argument(
            "--format", dest="output_format", choices=("text", "json"),
            default=engine_setting("FORMAT"),
        )
        parser.add_argument("--no-timing", dest="timing", action="store_false")

    def handle(self, *args, **options):
        try:
            session = self._session(options)
            handler = getattr(self, f"do_{options['subcommand'].replace('-', '_')}")
            passed = handler(session, options)

        except (CheckUsageError, ExpressionError, RegistryError) as exc:
            logger.error(f"Usage error: {exc}")
            raise CommandError(str(exc), returncode=USAGE)

        except NcpnError as exc:
            logger.error(f"Engine error: {exc}")
            raise CommandError(str(exc), returncode=FAILED)

        if passed is False:
            raise CommandError("verification failed", returncode=FAILED)

    # setup

    def _session(self, options) -> Session:
        session = Session(
            Options(
                bound=options["bound"],
                depth=options["depth"],
                seed=options["seed"],
                points=options["points"],
                conjugations=engine_setting("CONJUGATIONS"),
                chunk_size=engine_setting("CHUNK_SIZE"),
                chain=options["chain"],
                links=options["links"],
                timing=options["timing"],
                output_format=options["output_format"],
            )
        )
        quiver = options.get("quiver")
        if quiver in ("cm", "gh"):
            session.use_builtin_quiver(f"{quiver}.quiver")
        elif quiver:
            session.load_quiver(self._read(quiver))
        else:
            first = next(
                (v for k, v in options.items() if k in ("arguments", "bivector", "left", "function") and v),
                None,
            )
            name = first[0] if isinstance(first, list) else first
            if name and name.partition(".")[0] in ("cm", "gh"):
                session.use_builtin_quiver(name)
        if options.get("dim"):
            session.options.dim = parse_dim(
                options["dim"], session.quiver or system_quiver("cm.quiver")
            )
        return session

    def _read(self, path: str) -> str:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise CheckUsageError(f"cannot read {path}: {exc}")

    def _emit_value(self, value, options) -> None:
        if options["output_format"] == "json":
            self.stdout.write(render_json({"value": str(value), "terms": terms_data(value)}))
        else:
            self.stdout.write(str(value))

    def _emit_reports(self, reports, options) -> bool:
        if options["output_format"] == "json":
            data = ReportSerializer(reports, many=True).data
            self.stdout.write(render_json(data[0] if len(data) == 1 else data))
        else:
            for report in reports:
                self.stdout.write(report.as_text())
        return all(report.verdict for report in reports)

    # subcommands

    def do_parse(self, session: Session, options):
        self._emit_value(session.resolve(options["expression"]), options)

    def do_normalize(self, session: Session, options):
        value = session.resolve(options["expression"])
        if isinstance(value, Bivector):
            value = value.vector
        elif not isinstance(value, (PolyVector, FormWord)):
            value = FormWord.from_poly(value)
        if not isinstance(value, PolyVector):
            value = dr_normalize(value)
        self._emit_value(value, options)

    def do_schouten(self, session: Session, options):
        left, right = session.argument(options["left"]), session.argument(options["right"])
        self._emit_value(schouten(as_polyvector(left), as_polyvector(right)), options)

    def do_check(self, session: Session, options):
        report = session.run_check(options["name"], options["arguments"])
        return self._emit_reports([report], options)

    def do_hierarchy(self, session: Session, options):
        report = session.run_check("hierarchy", [options["bivector"], options["endo"]])
        return self._emit_reports([report], options)

    def do_rep_eval(self, session: Session, options):
        function = session.resolve(options["function"])
        if options["point"]:
            serializer = RepPointSerializer(
                data=load_json(self._read(options["point"])),
                context={"quiver": function.quiver},
            )
            if not serializer.is_valid():
                raise CheckUsageError(f"invalid rep-point file: {serializer.errors}")
            points = [serializer.validated_data["point"]]
        else:
            dim = session.options.dim
            if dim is None:
                raise CheckUsageError("rep-eval needs --point or --dim")
            points = random_points(
                DimVector.from_mapping(function.quiver, dim), session.options.points, session.options.seed
            )

        target = function
        if options["bracket"]:
            pi = session.argument(options["bracket"][0])
            other = session.resolve(options["bracket"][1])
            target = function_bracket(PoissonMap(as_bivector(pi)), function, other)

        values = [trace_fn(target, point) for point in points]
        if options["output_format"] == "json":
            self.stdout.write(render_json({
                "function": str(target),
                "values": [f"{v.numerator}/{v.denominator}" for v in values],
                "points": RepPointSerializer(points, many=True).data,
            }))
        else:
            for index, value in enumerate(values):
                self.stdout.write(f"point {index}: {value}")

    def do_run(self, session: Session, options):
        script = Script.from_source(self._read(options["script"]))
        return self._emit_reports(script.run(session), options)


def load_json(text: str):
    try:
        return json.loads(text)
    except ValueError as exc:
        raise CheckUsageError(f"rep-point file is not JSON: {exc}")
