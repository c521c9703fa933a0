"""Utility functions for reading and writing JSON documents"""

import json
import os
from typing import IO, Any, Union

from utils.errors import InvalidSpec


def load_json(source: Union[str, os.PathLike, IO]) -> Any:
    """Load JSON from a path or an open (text or binary) buffer"""
    if hasattr(source, "read"):
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        where = getattr(source, "name", "<buffer>")
    else:
        if not os.path.exists(source):
            raise InvalidSpec(f"File {source} does not exist")
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
        where = str(source)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{where} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc


def load_json_arg(text: str) -> Any:
    """A command-line argument that is either a JSON file path or inline JSON"""
    if os.path.exists(text):
        return load_json(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{text!r} is neither a file nor inline JSON") from exc


def dumps(obj: Any, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, indent=2, sort_keys=False)
    return json.dumps(obj, separators=(",", ":"))


def save_json(obj: Any, path: Union[str, os.PathLike], pretty: bool = True) -> None:
    directory = os.path.dirname(os.fspath(path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj, pretty))
        handle.write("\n")
