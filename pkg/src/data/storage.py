"""
Artifact writers: CSV tables, JSON sidecars and the per-run manifest.

CSV reals are written with 17 significant digits and '\n' line endings so
the same config and seed give byte-identical files.
"""
import datetime
import hashlib
import json
import logging
import os
import platform

import numpy as np
import pandas as pd
import pydantic
import scipy

from src import __version__
from src.errors import ConfigError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
FLOAT_FORMAT = "%.17g"


def ensure_dir(path):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {path}: {e}") from None
    return path


def write_csv(path, header, rows):
    """Writes one header line plus rows; returns the number of data rows."""
    ensure_dir(os.path.dirname(path) or ".")
    df = pd.DataFrame(list(rows), columns=list(header))
    for col in df.select_dtypes(include="bool").columns:
        df[col] = df[col].astype(int)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n", encoding="utf-8")
    logger.info("wrote %s (%d rows)", path, len(df))
    return len(df)


def read_csv(path):
    """(header, rows) with every cell left as a string."""
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        return [], []
    return list(df.columns), df.values.tolist()


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def write_json(path, payload):
    ensure_dir(os.path.dirname(path) or ".")
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_jsonable)
        f.write("\n")
    logger.info("wrote %s", path)
    return path


def load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (json.JSONDecodeError, IOError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from None


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def versions():
    return {
        "bilattice": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.VERSION,
        "python": platform.python_version(),
    }


def write_manifest(out_dir, command, canonical_config, artifacts, wall_time, extra=None):
    """
    manifest.json next to the artifacts.

    Holds the sha256 of the canonical config and of every artifact, library
    versions and the wall time. Only ``timestamp`` differs between reruns.
    """
    manifest = {
        "command": command,
        "config": json.loads(canonical_config),
        "inputs_sha256": hashlib.sha256(canonical_config.encode("utf-8")).hexdigest(),
        "artifacts": {
            os.path.relpath(p, out_dir): sha256_file(p) for p in sorted(artifacts) if os.path.exists(p)
        },
        "versions": versions(),
        "wall_time_s": round(float(wall_time), 3),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    return write_json(os.path.join(out_dir, MANIFEST_FILE), manifest)
