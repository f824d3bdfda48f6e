"""Report and figure-data export: JSON reports, CSV traces, SVG polylines"""

import csv
import hashlib
import json
import logging
import math
import os
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """JSON-ready copy of numpy scalars, arrays, complex numbers and tuples"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def canonical_json(data: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=indent, ensure_ascii=True)


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the compact canonical JSON of a configuration"""
    return hashlib.sha256(canonical_json(config, indent=None).encode("ascii")).hexdigest()


def sha256_bytes(payload: bytes) -> str:
    return hashlib.sha256(payload).hexdigest()


def _write(path: str, payload: bytes) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as handle:
        handle.write(payload)
    logger.debug(f"Wrote {len(payload)} bytes to {path}")
    return sha256_bytes(payload)


def write_report(path: str, report: Dict[str, Any], config: Dict[str, Any], version: str) -> str:
    """
    Write a JSON report with the config hash and version embedded

    The wall-clock time goes to ``<path>.meta.json`` only, so equal inputs give
    equal report bytes.

    Returns:
        sha256 of the report bytes
    """
    document = {"config_hash": config_hash(config), "version": version, "report": report}
    digest = _write(path, (canonical_json(document) + "\n").encode("ascii"))
    meta = {"written_at": datetime.now(timezone.utc).isoformat(), "sha256": digest}
    _write(path + ".meta.json", (canonical_json(meta) + "\n").encode("ascii"))
    return digest


def write_trace_csv(path: str, rows: Iterable[Tuple[float, float, float]]) -> str:
    """CSV with header t,re,im; floats written with repr precision"""
    lines = [["t", "re", "im"]] + [[repr(float(t)), repr(float(x)), repr(float(y))] for t, x, y in rows]
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as handle:
        csv.writer(handle, lineterminator="\n").writerows(lines)
    with open(path, "rb") as handle:
        return sha256_bytes(handle.read())


def svg_polyline(points: Sequence[complex], stroke: str = "black", size: int = 800) -> str:
    """Closed polyline in a viewBox fitted to its bounding box (image y axis points up)"""
    points = np.asarray(points, dtype=complex)
    finite = points[np.isfinite(points)]
    lo_x, hi_x = float(np.min(finite.real)), float(np.max(finite.real))
    lo_y, hi_y = float(np.min(finite.imag)), float(np.max(finite.imag))
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-12)
    pad = 0.02 * span
    coords = " ".join(f"{p.real:.9g},{-p.imag:.9g}" for p in np.append(finite, finite[:1]))
    view = f"{lo_x - pad:.9g} {-hi_y - pad:.9g} {hi_x - lo_x + 2 * pad:.9g} {hi_y - lo_y + 2 * pad:.9g}"
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="{view}">\n'
        f'  <polyline fill="none" stroke="{stroke}" stroke-width="{span / size:.6g}" points="{coords}"/>\n'
        f'</svg>\n'
    )


def write_trace_svg(path: str, points: Sequence[complex]) -> str:
    return _write(path, svg_polyline(points).encode("ascii"))
