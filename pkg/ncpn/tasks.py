import logging
from typing import Dict, List

from celery import group, shared_task

from .exceptions import NcpnError
from .sweeps import chunk_bounds, decode, items, run_chunk

logger = logging.getLogger(__name__)


@shared_task
def sweep_chunk(kind: str, payload: Dict, start: int, stop: int) -> Dict:
    """
    Evaluate one slice of a bounded-family or random-point sweep.

    Args:
        kind: The sweep kind (torsion, algebraic, concomitant, ksm, jacobi, ...)
        payload: The encoded sweep context
        start: First item index
        stop: One past the last item index

    Returns:
        Dictionary with status, number of items checked and the first failure
    """
    try:
        result = run_chunk(kind, payload, start, stop)
        logger.debug(f"Sweep {kind} chunk {start}:{stop} checked {result['checked']} items")
        return {"status": "success", "start": start, **result}

    except NcpnError as exc:
        logger.error(f"Sweep {kind} chunk {start}:{stop} failed: {exc}")
        return {"status": "error", "start": start, "message": str(exc)}


def run_sweep(kind: str, payload: Dict, chunk_size: int) -> Dict:
    """
    Split a sweep into chunks, dispatch them as a group and merge in order.

    Returns:
        Dictionary with status, total items checked, and the first failing
        item with its residue (by item order, not completion order)
    """
    total = len(items(kind, decode(payload)))
    bounds = chunk_bounds(total, chunk_size)
    if not bounds:
        return {"status": "success", "checked": 0, "failure": None, "residue": None}

    results: List[Dict] = (
        group(sweep_chunk.s(kind, payload, start, stop) for start, stop in bounds)
        .apply_async()
        .get(disable_sync_subtasks=False)
    )
    results.sort(key=lambda r: r["start"])

    errors = [r for r in results if r["status"] == "error"]
    if errors:
        return {"status": "error", "message": errors[0]["message"]}

    checked = sum(r["checked"] for r in results)
    failed = next((r for r in results if r["failure"] is not None), None)
    logger.info(
        f"Sweep {kind} complete: {checked} of {total} items checked in {len(bounds)} chunks"
    )
    return {
        "status": "success",
        "checked": checked,
        "failure": failed["failure"] if failed else None,
        "residue": failed["residue"] if failed else None,
    }
