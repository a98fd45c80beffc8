"""CSV and JSON file formats. All writes are atomic (temp file + rename)."""
import json
import os
import tempfile

import numpy as np

from .errors import DimensionMismatch, InvalidInput, ParseError
from .evalmetrics import edge_set
from .mixture import MixtureParams
from .simulate import SimTruth

SCHEMA_VERSION = 1


def atomic_write(path, text):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(v):
    return f"{float(v):.17g}"


def write_csv(path, x, header=None):
    lines = []
    if header is not None:
        lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in np.asarray(x))
    atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path, header=False):
    """Parse a numeric CSV. Returns ``(data, column_names or None)``.

    Line numbers in ``ParseError`` are 1-based and count the header.
    """
    rows, names, width = [], None, None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if header and names is None:
                names = [c.strip() for c in line.split(",")]
                width = len(names)
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            if len(cells) != width:
                raise ParseError(f"{path}: row {lineno} has {len(cells)} fields, expected {width}", lineno)
            try:
                vals = [float(c) for c in cells]
            except ValueError:
                raise ParseError(f"{path}: row {lineno} is not numeric: {line[:60]!r}", lineno) from None
            if not all(np.isfinite(vals)):
                raise ParseError(f"{path}: row {lineno} contains NaN or Inf", lineno)
            rows.append(vals)
    if not rows:
        raise ParseError(f"{path}: no data rows", None)
    return np.array(rows, dtype=float), names


def dump_json(path, obj):
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def load_json(path, kind=None):
    with open(path) as fh:
        obj = json.load(fh)
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise InvalidInput(f"{path}: unsupported schema_version {obj.get('schema_version')!r}")
    if kind is not None and obj.get("kind") != kind:
        raise InvalidInput(f"{path}: expected a {kind!r} file, got {obj.get('kind')!r}")
    return obj


def params_to_json(params):
    return {"k": params.k, "p": params.p, "pi": params.pi.tolist(),
            "thetas": params.thetas.tolist()}


def params_from_json(obj):
    return MixtureParams(np.array(obj["pi"], dtype=float), np.array(obj["thetas"], dtype=float))


def truth_to_json(truth):
    return {"schema_version": SCHEMA_VERSION, "kind": "truth", **params_to_json(truth.params),
            "labels": truth.labels.tolist(), "seed": truth.seed}


def truth_from_json(obj):
    return SimTruth(params_from_json(obj), np.array(obj.get("labels", []), dtype=int),
                    int(obj.get("seed", 0)))


def edge_lists(params):
    return [sorted([i, j] for i, j in edge_set(t)) for t in params.thetas]


def check_compatible(fit_params, truth_params):
    if fit_params.k != truth_params.k or fit_params.p != truth_params.p:
        raise DimensionMismatch(
            f"fit has K={fit_params.k}, p={fit_params.p} but truth has "
            f"K={truth_params.k}, p={truth_params.p}")


def to_dot(theta, name, labels=None):
    p = np.asarray(theta).shape[0]
    labels = labels or [str(i) for i in range(p)]
    out = [f"graph {name} {{"]
    out += [f'  "{lab}";' for lab in labels]
    for i, j in sorted(edge_set(theta)):
        out.append(f'  "{labels[i]}" -- "{labels[j]}" [weight={fmt(theta[i][j])}];')
    out.append("}")
    return "\n".join(out) + "\n"
