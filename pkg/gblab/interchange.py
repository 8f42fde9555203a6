"""JSON files read and written by the command line.

* a matrix is an array of equally long arrays of numbers, optionally under a ``"matrix"`` key;
* a tensor ``h[l][i][j]`` is a three-level array, optionally under a ``"tensor"`` key;
* a chain is ``{"kind": "simplex" | "cube", "n": n, "cells": [{"g": [+-1, ...], "I": [...], "coeff": c}]}``
  with ``I`` listing 1-based indices and ``g`` a full sign vector of length ``n``.

Every reading error is an :class:`~gblab.errors.InputError` that names the file and the
position of the offending value.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from gblab.chains import Chain
from gblab.chains import cube
from gblab.chains import representative
from gblab.chains import simplex
from gblab.errors import GBLabError
from gblab.errors import InputError
from gblab.group import GroupElement

logger = logging.getLogger(__name__)


def load_json(path: Path) -> Any:
    """Parse a UTF-8 JSON file.

    Raises:
        InputError: the file cannot be read or is not valid JSON; the message carries
            ``file:line:column``.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        raise InputError(f"{path}: cannot read input: {err}") from err
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}:{err.lineno}:{err.colno}: {err.msg}") from err


def _unwrap(payload: Any, key: str, source: str) -> Any:
    if isinstance(payload, dict):
        if key not in payload:
            raise InputError(f"{source}: expected an array or an object with a {key!r} key")
        return payload[key]
    return payload


def _number(value: Any, where: str, source: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{source}: entry {where} is not a number: {value!r}")
    return float(value)


def parse_matrix(payload: Any, source: str = "<input>") -> np.ndarray:
    """A rectangular numeric matrix from nested lists."""
    rows = _unwrap(payload, "matrix", source)
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{source}: a matrix must be a nonempty array of rows")
    width = None
    values = []
    for r, row in enumerate(rows):
        if not isinstance(row, list):
            raise InputError(f"{source}: row [{r}] is not an array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{source}: row [{r}] has {len(row)} entries, expected {width}")
        values.append([_number(value, f"[{r}][{c}]", source) for c, value in enumerate(row)])
    return np.array(values, dtype=float)


def parse_tensor(payload: Any, source: str = "<input>") -> np.ndarray:
    """An ``n x n x n`` array of numbers from three-level nested lists."""
    slices = _unwrap(payload, "tensor", source)
    if not isinstance(slices, list) or not slices:
        raise InputError(f"{source}: a tensor must be a nonempty array of matrices")
    n = len(slices)
    result = np.empty((n, n, n))
    for index, block in enumerate(slices):
        matrix = parse_matrix(block, f"{source} slice [{index}]")
        if matrix.shape != (n, n):
            raise InputError(f"{source}: slice [{index}] has shape {matrix.shape}, expected ({n}, {n})")
        result[index] = matrix
    return result


def read_matrix(path: Path) -> np.ndarray:
    matrix = parse_matrix(load_json(path), str(path))
    logger.debug("read %s matrix from %s", matrix.shape, path)
    return matrix


def read_tensor(path: Path) -> np.ndarray:
    tensor = parse_tensor(load_json(path), str(path))
    logger.debug("read %s tensor from %s", tensor.shape, path)
    return tensor


def _integer(value: Any, where: str, source: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{source}: {where} must be an integer, got {value!r}")
    return value


def _signs(value: Any, n: int, where: str, source: str) -> list[int]:
    if not isinstance(value, list) or len(value) != n:
        raise InputError(f"{source}: {where}.g must be a list of {n} signs")
    signs = [_integer(sign, f"{where}.g", source) for sign in value]
    if any(sign not in (1, -1) for sign in signs):
        raise InputError(f"{source}: {where}.g must hold only +1 and -1, got {signs}")
    return signs


def parse_chain(payload: Any, source: str = "<input>") -> Chain:
    """A :class:`~gblab.chains.Chain` from its record form."""
    if not isinstance(payload, dict):
        raise InputError(f"{source}: a chain must be an object")
    kind = payload.get("kind")
    if kind not in ("simplex", "cube"):
        raise InputError(f"{source}: chain kind must be 'simplex' or 'cube', got {kind!r}")
    n = _integer(payload.get("n"), "n", source)
    if n < 1:
        raise InputError(f"{source}: n must be positive, got {n}")
    records = payload.get("cells")
    if not isinstance(records, list):
        raise InputError(f"{source}: 'cells' must be an array")
    build = simplex if kind == "simplex" else cube
    chain = Chain.zero(kind, n)
    for position, record in enumerate(records):
        where = f"cells[{position}]"
        if not isinstance(record, dict):
            raise InputError(f"{source}: {where} must be an object")
        signs = _signs(record.get("g"), n, where, source)
        indices = record.get("I")
        if not isinstance(indices, list) or not indices:
            raise InputError(f"{source}: {where}.I must be a nonempty list")
        zero_based = []
        for index in indices:
            value = _integer(index, f"{where}.I", source)
            if not 1 <= value <= n:
                raise InputError(f"{source}: {where}.I entries must lie in 1..{n}, got {value}")
            zero_based.append(value - 1)
        coefficient = _integer(record.get("coeff", 1), f"{where}.coeff", source)
        try:
            chain = chain + build(n, GroupElement(signs), zero_based, coefficient)
        except GBLabError as err:
            raise InputError(f"{source}: {where}: {err}") from err
    return chain


def read_chain(path: Path) -> Chain:
    return parse_chain(load_json(path), str(path))


def chain_record(chain: Chain) -> dict[str, Any]:
    """The record form of a chain; :func:`parse_chain` reads it back to the same chain."""
    cells = []
    for key, coefficient in chain.items():
        g = representative(chain.n, key)
        cells.append({"g": list(g.signs), "I": [i + 1 for i in key[0]], "coeff": coefficient})
    return {"kind": chain.kind, "n": chain.n, "cells": cells}


def to_jsonable(value: Any) -> Any:
    """Nested lists, dicts and floats only; numpy scalars and arrays are converted."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(key): to_jsonable(entry) for key, entry in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(entry) for entry in value]
    return value


def dump_json(value: Any) -> str:
    """Stable JSON text, keys sorted."""
    return json.dumps(to_jsonable(value), sort_keys=True, indent=2) + "\n"
