import json
from pathlib import Path

import numpy as np


def strip_runtime_fields(obj):
    """Drop wall-clock fields from a parsed JSON record, recursively."""
    if isinstance(obj, dict):
        return {k: strip_runtime_fields(v) for k, v in obj.items()
                if "runtime" not in k}
    if isinstance(obj, list):
        return [strip_runtime_fields(v) for v in obj]
    return obj


def canonical_artifact(path: Path):
    """Artifact content with runtime-valued fields masked.

    JSON records lose keys containing 'runtime'; CSV tables lose columns whose
    header contains 'runtime'.  Everything else must match byte for byte.
    """
    raw = path.read_bytes()
    if path.suffix == ".json":
        return json.dumps(strip_runtime_fields(json.loads(raw)), sort_keys=True)
    if path.suffix == ".csv":
        lines = raw.decode("utf-8").splitlines()
        header = lines[0].split(",")
        keep = [i for i, name in enumerate(header) if "runtime" not in name]
        if len(keep) == len(header):
            return raw
        out = []
        for ln in lines:
            cells = ln.split(",")
            out.append(",".join(cells[i] for i in keep))
        return "\n".join(out)
    return raw


def assert_dirs_match(a: Path, b: Path):
    """Byte-identity of two artifact directories, runtime fields excepted."""
    names_a = sorted(p.name for p in a.iterdir())
    names_b = sorted(p.name for p in b.iterdir())
    assert names_a == names_b
    for name in names_a:
        assert canonical_artifact(a / name) == canonical_artifact(b / name), name
