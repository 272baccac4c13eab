import argparse
import dataclasses
import json
import os
from pathlib import Path


def parse_config(cls, description: str):
    """Build ``cls`` from command-line flags named after its fields."""
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default
        kind = type(default)
        if kind is tuple:
            p.add_argument(f"--{f.name.replace('_', '-')}", type=int, nargs="+", default=list(default))
        elif kind is bool:
            p.add_argument(f"--{f.name.replace('_', '-')}", action=argparse.BooleanOptionalAction,
                           default=default)
        else:
            p.add_argument(f"--{f.name.replace('_', '-')}", type=kind, default=default)
    args = vars(p.parse_args())
    for f in dataclasses.fields(cls):
        if isinstance(f.default, tuple):
            args[f.name] = tuple(args[f.name])
    return cls(**args)


def out_dir(cfg) -> Path:
    path = Path(cfg.out)
    os.makedirs(path, exist_ok=True)
    (path / "config.json").write_text(json.dumps(dataclasses.asdict(cfg), indent=2, sort_keys=True))
    return path
