"""JSON and CSV writers with round-trip float formatting and run metadata."""
import csv
import dataclasses
import json
import math
import subprocess
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__


@lru_cache(maxsize=1)
def build_id():
    """git describe of the source tree, or the package version outside git."""
    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=here, capture_output=True, text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def fmt(x):
    """17 significant digits, '.' decimal, no grouping."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _plain(o):
    if dataclasses.is_dataclass(o) and not isinstance(o, type):
        return _plain(dataclasses.asdict(o))
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return _plain(o.tolist())
    if isinstance(o, (complex, np.complexfloating)):
        return {"re": _plain(o.real), "im": _plain(o.imag)}
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (float, np.floating)):
        x = float(o)
        # JSON has no inf/nan; keep them readable as strings
        return x if math.isfinite(x) else fmt(x)
    return o


def dumps(payload, config=None):
    doc = {"build": build_id(), "config": _plain(config or {}), "result": _plain(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, payload, config=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload, config))
    return path


def write_csv(path, header, rows, config=None):
    """CSV with a leading comment line holding the build id and config."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        meta = json.dumps({"build": build_id(), "config": _plain(config or {})}, sort_keys=True)
        fh.write(f"# {meta}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def read_csv(path):
    """Rows of a file written by write_csv, as (header, list of string rows)."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rd = csv.reader(lines)
    header = next(rd)
    return header, list(rd)
