import pytest

from ncpn.pn import RegularEndo
from ncpn.registry import builtin, cm_pi
from ncpn.sweeps import SweepContext, chunk_bounds, decode, encode, items
from ncpn.tasks import run_sweep, sweep_chunk


@pytest.fixture
def failing_payload(cm, expr_factory):
    """π₀ with d^N a = a d a: the algebraic sweep fails on d a."""
    endo = RegularEndo(cm, {"a": expr_factory("a d a")})
    return encode(SweepContext(cm, 1, pi=cm_pi(0), endo=endo))


@pytest.fixture
def lift_payload(cm):
    return encode(SweepContext(cm, 1, pi=cm_pi(0), endo=builtin("cm.N")))


@pytest.mark.unit
class TestChunkBounds:
    def test_even_split(self):
        assert chunk_bounds(6, 2) == [(0, 2), (2, 4), (4, 6)]

    def test_last_chunk_is_short(self):
        assert chunk_bounds(5, 4) == [(0, 4), (4, 5)]

    def test_empty(self):
        assert chunk_bounds(0, 8) == []


@pytest.mark.unit
class TestPayloads:
    def test_context_survives_encoding(self, lift_payload, cm):
        context = decode(lift_payload)
        assert context.quiver == cm
        assert context.pi == cm_pi(0)
        assert context.endo.images == builtin("cm.N").images
        assert context.bound == 1

    def test_item_counts(self, lift_payload):
        context = decode(lift_payload)
        forms = len(context.forms())
        assert len(items("algebraic", context)) == forms
        assert len(items("concomitant", context)) == forms * (forms - 1) // 2

    def test_ksm_derivations_cover_the_bound(self, cm):
        context = SweepContext(cm, 2, pi=cm_pi(0), endo=builtin("cm.N"))
        thetas = {item[2] for item in items("ksm", context)}
        assert thetas == set(range(len(context.derivations())))
        assert len(context.derivations()) > len(context.derivations(1))

    def test_unknown_kind(self, lift_payload):
        with pytest.raises(ValueError):
            items("nonsense", decode(lift_payload))


@pytest.mark.celery
class TestSweepChunk:
    def test_success(self, lift_payload):
        result = sweep_chunk("algebraic", lift_payload, 0, 2)
        assert result == {
            "status": "success",
            "start": 0,
            "checked": 2,
            "failure": None,
            "residue": None,
        }

    def test_failure_is_reported_with_its_residue(self, failing_payload):
        result = sweep_chunk("algebraic", failing_payload, 0, 3)
        assert result["status"] == "success"
        assert result["failure"] == [0]
        assert result["residue"] == "a @a^"

    def test_engine_errors_become_error_results(self, lift_payload):
        payload = dict(lift_payload, quiver="quiver broken {")
        result = sweep_chunk("algebraic", payload, 0, 1)
        assert result["status"] == "error"
        assert result["start"] == 0
        assert result["message"]


@pytest.mark.celery
class TestRunSweep:
    def test_all_items_are_checked(self, lift_payload):
        total = len(items("algebraic", decode(lift_payload)))
        result = run_sweep("algebraic", lift_payload, 2)
        assert result["status"] == "success"
        assert result["checked"] == total
        assert result["failure"] is None

    def test_first_failure_in_item_order(self, failing_payload):
        for size in (1, 2, 64):
            result = run_sweep("algebraic", failing_payload, size)
            assert result["failure"] == [0]
            assert result["residue"] == "a @a^"

    def test_empty_sweep(self, cm):
        payload = encode(SweepContext(cm, pi=cm_pi(0), dim={"o": 1}, points=0))
        assert run_sweep("jacobi", payload, 4) == {
            "status": "success",
            "checked": 0,
            "failure": None,
            "residue": None,
        }

    def test_point_sweep(self, cm):
        payload = encode(
            SweepContext(
                cm,
                pi=cm_pi(1),
                functions=(builtin("cm.I1"), builtin("cm.J1"), builtin("cm.J2")),
                dim={"o": 2},
                points=3,
            )
        )
        result = run_sweep("jacobi", payload, 2)
        assert result["status"] == "success"
        assert result["checked"] == 3
        assert result["failure"] is None
