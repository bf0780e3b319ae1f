import pytest

from ncpn.checks import Options
from ncpn.exceptions import CheckUsageError, ExpressionError, RegistryError
from ncpn.registry import builtin, cm_pi
from ncpn.session import Script, Session, parse_dim

from .test_grammar import GH_SOURCE


@pytest.fixture
def session(options_factory):
    return Session(options_factory())


@pytest.mark.unit
class TestParseDim:
    def test_positional(self, gh):
        assert parse_dim("2,1", gh) == {"1": 2, "2": 1}

    def test_named(self, gh):
        assert parse_dim("2=1, 1=3", gh) == {"2": 1, "1": 3}

    def test_wrong_length(self, gh):
        with pytest.raises(CheckUsageError):
            parse_dim("2", gh)


@pytest.mark.unit
class TestSession:
    def test_default_options(self):
        assert Session().options == Options()

    def test_loading_a_quiver_doubles_it(self, session, gh):
        assert session.load_quiver(GH_SOURCE) == gh
        assert session.use_builtin_quiver("cm.pi0") == builtin("cm.quiver")

    def test_expressions_need_a_quiver(self, session):
        with pytest.raises(ExpressionError, match="no quiver"):
            session.evaluate("a a^")

    def test_resolution_order(self, session, cm):
        session.use_builtin_quiver("cm.quiver")
        session.define("f", cm.path("a", "a^"))
        assert session.resolve("f") == cm.path("a", "a^")
        assert session.resolve("cm.pi1") == cm_pi(1)
        assert session.resolve("a^ a") == cm.path("a^", "a")

    def test_unknown_builtin(self, session):
        with pytest.raises(RegistryError):
            session.resolve("cm.nothing")

    def test_names_are_bound_once(self, session, cm):
        session.define("f", cm.unit())
        with pytest.raises(ExpressionError, match="already defined"):
            session.define("f", cm.unit())

    def test_values_must_live_on_the_loaded_quiver(self, session):
        session.use_builtin_quiver("gh.quiver")
        with pytest.raises(ExpressionError):
            session.define("pi", cm_pi(0))

    def test_run_check(self, session):
        report = session.run_check("poisson", ["cm.pi1"])
        assert report.verdict
        assert report.params["arguments"] == ["cm.pi1"]

    def test_bound_expression_argument(self, session):
        session.use_builtin_quiver("cm.quiver")
        report = session.run_check("schouten", ["[@a^, @a]", "cm.pi1"])
        assert report.verdict


@pytest.mark.unit
class TestScript:
    def test_runs_every_check(self, session):
        script = Script.from_source(
            """
            let pi = cm.pi1;
            check poisson pi;
            check schouten cm.pi0 pi;
            check lenard cm.pi0 pi --links=2;
            """
        )
        reports = script.run(session)
        assert [report.check for report in reports] == ["poisson", "schouten", "lenard"]
        assert all(report.verdict for report in reports)
        assert reports[2].params["links"] == 2

    def test_declared_quiver_and_expression(self, session):
        script = Script.from_source(
            GH_SOURCE
            + """
            let f = a x x^ + a y^ y;
            check jacobi gh.pi1 gh.I1 gh.J1 f --points=1 --dim=1=2,2=1;
            """
        )
        (report,) = script.run(session)
        assert report.verdict
        assert report.params["dim"] == {"1": 2, "2": 1}
        assert report.params["points"] == 1

    def test_binding_happens_before_any_check(self, session):
        script = Script.from_source("check poisson cm.pi1;\nlet g = cm.missing;")
        with pytest.raises(ExpressionError):
            script.run(session)

    def test_unknown_option(self, session):
        script = Script.from_source("check poisson cm.pi1 --colour=red;")
        with pytest.raises(CheckUsageError, match="--colour"):
            script.run(session)

    def test_no_timing_flag(self, options_factory):
        session = Session(options_factory(timing=True))
        (report,) = Script.from_source("check poisson cm.pi1 --no-timing;").run(session)
        assert report.elapsed_ms is None

    def test_empty_script(self, session):
        assert Script.from_source("").run(session) == []
