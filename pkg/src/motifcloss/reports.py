"""Report framing, bundled inputs and the module-system file format."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

from motifcloss import __version__
from motifcloss.condensation import ModuleSpec
from motifcloss.graph import Digraph, load_edge_list

TOOL = "motifcloss"
BUNDLED = {"planted": "planted_ffl.txt", "fig3": "fig3_system.json"}


def bundled_text(name: str) -> str:
    if name not in BUNDLED:
        raise FileNotFoundError(f"no bundled input @{name}; choose from "
                                + ", ".join("@" + k for k in sorted(BUNDLED)))
    return resources.files("motifcloss").joinpath("data", BUNDLED[name]).read_text(encoding="utf-8")


def read_input(path: str) -> str:
    """Contents of a file, or of a bundled dataset when ``path`` is ``@name``."""
    if path.startswith("@"):
        return bundled_text(path[1:])
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def load_graph(path: str) -> Digraph:
    return load_edge_list(read_input(path))


def jsonable(x):
    """Plain JSON types; non-finite floats become strings so output stays valid JSON."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def meta(config: dict) -> dict:
    return {"tool": TOOL, "version": __version__, "config": config, "seed": config.get("seed")}


def csv_header(config: dict) -> str:
    return (f"# {TOOL} {__version__}\n"
            f"# config: {json.dumps(jsonable(config), sort_keys=True)}\n")


def json_report(config: dict, body: dict) -> str:
    doc = {"meta": meta(config)}
    doc.update(body)
    return json.dumps(jsonable(doc), indent=2, sort_keys=True) + "\n"


def csv_rows(text: str) -> list[dict]:
    """Parse CSV emitted by this package (comment lines skipped) into dicts."""
    import csv
    import io

    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def load_module_system(text: str) -> tuple[list[ModuleSpec], dict]:
    """Modules and inter-module blocks from the JSON module-system format.

    ``{"modules": [{"A", "node_rates", "B", "C", "metric"?, "name"?}],
    "blocks": [{"to": i, "from": j, "A": [[...]]}]}``
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"module system is not valid JSON: {e}") from None
    try:
        modules = [ModuleSpec.build(m["A"], m["node_rates"], m["B"], m["C"],
                                    m.get("metric", "identity"), name=m.get("name", f"M{k + 1}"))
                   for k, m in enumerate(doc["modules"])]
        blocks = {}
        for b in doc.get("blocks", []):
            key = (int(b["to"]), int(b["from"]))
            if key in blocks:
                raise ValueError(f"duplicate block {key}")
            if not (0 <= key[0] < len(modules) and 0 <= key[1] < len(modules)):
                raise ValueError(f"block {key} refers to a missing module")
            blocks[key] = np.atleast_2d(np.asarray(b["A"], dtype=float))
    except KeyError as e:
        raise ValueError(f"module system is missing field {e}") from None
    return modules, blocks
