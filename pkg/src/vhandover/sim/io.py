"""CSV emission for traces and handover events."""

from __future__ import annotations

import io
import math
from typing import Iterable, Sequence, TextIO

from .engine import HandoverEvent, TraceRecord

NONE_TOKEN = "none"


def fmt(x: float) -> str:
    """9 significant digits, locale-independent."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def _tok(network_id: str | None) -> str:
    return NONE_TOKEN if network_id is None else network_id


def write_trace(fh: TextIO, trace: Iterable[TraceRecord], network_ids: Sequence[str]) -> None:
    cols = ["time_s", "x_m", "y_m", "serving", "rss_db"] + [f"z_{n}" for n in network_ids]
    fh.write(",".join(cols) + "\n")
    for r in trace:
        row = [fmt(r.time_s), fmt(r.position[0]), fmt(r.position[1]), _tok(r.serving_network), fmt(r.rss_db)]
        row += [fmt(r.z_per_network.get(n, math.nan)) for n in network_ids]
        fh.write(",".join(row) + "\n")


def write_events(fh: TextIO, events: Iterable[HandoverEvent]) -> None:
    fh.write("time_s,from,to,rss_db\n")
    for e in events:
        fh.write(f"{fmt(e.time_s)},{_tok(e.from_network)},{e.to_network},{fmt(e.rss_db_at_decision)}\n")


def trace_to_string(trace, network_ids) -> str:
    buf = io.StringIO()
    write_trace(buf, trace, network_ids)
    return buf.getvalue()
