"""JSON model files: one format for 2-D and n-D models.

    {"n": 2, "kinds": ["shift", "shift"],
     "blocks": [[[[0.5]], [[0.3]]], [[[0.3]], [[0.5]]]],
     "name": "S1"}

``blocks[i][j]`` is the row-major matrix ``A_{i+1,j+1}``. Numbers are written
with ``repr`` so a load/dump round trip is bit-exact.
"""
from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .errors import ModelFileError
from .model import NdRoesserModel, RoesserModel


def load_schema(name: str) -> dict:
    return json.loads(resources.files(__package__).joinpath("schemas", name).read_text())


def _path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out or "<root>"


def parse_model(doc: dict, source: str = "<memory>"):
    """Validate ``doc`` and build a RoesserModel (n = 2) or NdRoesserModel."""
    validator = jsonschema.Draft202012Validator(load_schema("model.schema.json"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ModelFileError(source, f"{_path(e.absolute_path)}: {e.message}")
    n = doc["n"]
    if len(doc["kinds"]) != n:
        raise ModelFileError(source, f"kinds: expected {n} entries, got {len(doc['kinds'])}")
    blocks = doc["blocks"]
    if len(blocks) != n:
        raise ModelFileError(source, f"blocks: expected {n} block rows, got {len(blocks)}")
    for i, row in enumerate(blocks):
        if len(row) != n:
            raise ModelFileError(source, f"blocks[{i}]: expected {n} blocks, got {len(row)}")
    sizes_r = [len(blocks[i][i]) for i in range(n)]
    sizes_c = [len(blocks[i][i][0]) for i in range(n)]
    for i in range(n):
        if sizes_r[i] != sizes_c[i]:
            raise ModelFileError(source, f"blocks[{i}][{i}]: diagonal block must be square, "
                                         f"got {sizes_r[i]}x{sizes_c[i]}")
    for i in range(n):
        for j in range(n):
            b = blocks[i][j]
            if len(b) != sizes_r[i]:
                raise ModelFileError(source, f"blocks[{i}][{j}]: expected {sizes_r[i]} rows, got {len(b)}")
            for r, row in enumerate(b):
                if len(row) != sizes_c[j]:
                    raise ModelFileError(
                        source, f"blocks[{i}][{j}][{r}]: expected {sizes_c[j]} columns, got {len(row)}")
    try:
        nd = NdRoesserModel(blocks, doc["kinds"], doc.get("name"))
    except ValueError as exc:
        raise ModelFileError(source, str(exc)) from None
    return nd.as_2d() if n == 2 else nd


def load_model(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFileError(path, exc.strerror or str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(path, f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_model(doc, str(path))


def model_to_doc(m) -> dict:
    nd = m.to_nd() if isinstance(m, RoesserModel) else m
    doc = {"n": nd.n, "kinds": [k.value for k in nd.kinds],
           "blocks": [[b.tolist() for b in row] for row in nd.blocks]}
    if nd.name is not None:
        doc["name"] = nd.name
    return doc


def dumps_model(m) -> str:
    # json uses float.__repr__, the shortest exact round-trip form
    return json.dumps(model_to_doc(m), indent=1)


def dump_model(m, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_model(m) + "\n")
