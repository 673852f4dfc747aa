"""Line-delimited simulation trace records.

One JSON object per line, in deterministic emission order. Every record
carries at least ``t`` (simulation seconds), ``kind`` and ``node``. Kinds:

- ``scenario``: effective config, node positions and neighbor lists
- ``route``: discovery outcome (``install`` / ``fail`` / ``reroute``)
- ``send``: a data packet leaves its source
- ``tx``: one data frame transmission (transmitter, receiver, power, bits)
- ``delivery``: final per-packet outcome with per-link SINR values
- ``power``: a transmit-power change from the adaptation rule
- ``control``: per-node control frame counters (end of run)
- ``energy``: per-node consumed energy in joules (end of run)
- ``flow``: per-flow packet accounting summary (end of run)
- ``end``: end-of-simulation marker

The byte content of a trace is a pure function of the scenario config, which
is what makes replay diffing and the determinism checks possible.
"""

import json
import os
import tempfile


def dump_records(records) -> str:
    return "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)


def write_jsonl(records, path):
    """Write records atomically (temp file + rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(dump_records(records))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_jsonl(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def write_text(text: str, path):
    """Atomic plain-text write used for CSVs and configs."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
