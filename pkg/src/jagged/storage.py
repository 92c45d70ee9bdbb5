"""On-disk containers: a directory with ``manifest.json`` and raw buffers.

Each buffer is stored as ``<id>.raw`` with no header, little-endian, and ids
``b0``, ``b1``, ... are assigned in depth-first node order (a list's offsets
before its content, a union's tags and index before its contents).  The
manifest describes the node tree and the dtype and length of every buffer;
``docs/manifest.md`` has the schema.
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path

import numpy as np

from .errors import ContainerIOError, FormatError
from .layout import (
    DTYPE_NAMES,
    DTYPES,
    EmptyArray,
    IndexedOptionArray,
    Layout,
    ListOffsetArray,
    NumericArray,
    RecordArray,
    UnionArray,
    check,
)

FORMAT_NAME = "jagged-container"
VERSION = 1
MANIFEST = "manifest.json"
_BUFFER_FILE = re.compile(r"b[0-9]+\.raw")


class _Writer:
    def __init__(self):
        self.buffers: list[np.ndarray] = []

    def ref(self, buf: np.ndarray) -> str:
        self.buffers.append(buf)
        return f"b{len(self.buffers) - 1}"

    def node(self, node: Layout) -> dict:
        out: dict = {}
        if isinstance(node, EmptyArray):
            out["kind"] = "empty"
        elif isinstance(node, NumericArray):
            out["kind"] = "numeric"
            out["dtype"] = node.dtype
            out["data"] = self.ref(node.data)
        elif isinstance(node, ListOffsetArray):
            out["kind"] = "listoffset"
            out["offsets"] = self.ref(node.offsets)
            out["content"] = self.node(node.content)
        elif isinstance(node, RecordArray):
            out["kind"] = "record"
            out["fields"] = [{"name": name, "content": self.node(c)} for name, c in node.items()]
        elif isinstance(node, UnionArray):
            out["kind"] = "union"
            out["tags"] = self.ref(node.tags)
            out["index"] = self.ref(node.index)
            out["contents"] = [self.node(c) for c in node.contents]
        elif isinstance(node, IndexedOptionArray):
            out["kind"] = "indexedoption"
            out["index"] = self.ref(node.index)
            out["content"] = self.node(node.content)
        else:
            raise TypeError(type(node).__name__)
        out["length"] = len(node)
        out["parameters"] = dict(node.parameters)
        return out


def _little_endian_bytes(buf: np.ndarray) -> bytes:
    if buf.dtype == np.bool_:
        return buf.view(np.uint8).tobytes()
    return buf.astype(buf.dtype.newbyteorder("<"), copy=False).tobytes()


def manifest_of(node: Layout) -> tuple[dict, list[np.ndarray]]:
    """The manifest document of ``node`` and its buffers in id order."""
    writer = _Writer()
    root = writer.node(node)
    manifest = {
        "format": FORMAT_NAME,
        "version": VERSION,
        "root": root,
        "buffers": {
            f"b{i}": {"dtype": DTYPE_NAMES[buf.dtype], "length": len(buf)}
            for i, buf in enumerate(writer.buffers)
        },
    }
    return manifest, writer.buffers


def _prepare_directory(path: Path):
    if path.exists() and not path.is_dir():
        raise ContainerIOError(f"{path} exists and is not a directory")
    if path.is_dir():
        entries = os.listdir(path)
        if entries and MANIFEST not in entries:
            raise ContainerIOError(f"refusing to overwrite {path}: not an empty directory or container")
        for name in entries:
            if name == MANIFEST or _BUFFER_FILE.fullmatch(name):
                (path / name).unlink()
            else:
                raise ContainerIOError(f"refusing to overwrite {path}: unexpected file {name!r}")
    else:
        path.mkdir(parents=True)


def write(node: Layout, path) -> None:
    """Write ``node`` as a container directory; rewriting is byte-identical."""
    check(node)
    path = Path(path)
    manifest, buffers = manifest_of(node)
    try:
        _prepare_directory(path)
        for i, buf in enumerate(buffers):
            (path / f"b{i}.raw").write_bytes(_little_endian_bytes(buf))
        text = json.dumps(manifest, indent=2, ensure_ascii=False) + "\n"
        (path / MANIFEST).write_text(text, encoding="utf-8")
    except ContainerIOError:
        raise
    except OSError as err:
        raise ContainerIOError(str(err)) from err


def _require(doc, key, where, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing field {key!r} in {where}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise FormatError(f"field {key!r} in {where} has the wrong type")
    return value


class _Reader:
    def __init__(self, path: Path, table: dict):
        self.path = path
        self.table = table

    def buffer(self, ref, expected_dtype=None) -> np.ndarray:
        if not isinstance(ref, str) or ref not in self.table:
            raise FormatError(f"unknown buffer reference {ref!r}")
        spec = self.table[ref]
        dtype_name = _require(spec, "dtype", f"buffer {ref}", str)
        length = _require(spec, "length", f"buffer {ref}", int)
        if dtype_name not in DTYPES:
            raise FormatError(f"buffer {ref} has unsupported dtype {dtype_name!r}")
        if expected_dtype is not None and dtype_name != expected_dtype:
            raise FormatError(f"buffer {ref} must have dtype {expected_dtype}, not {dtype_name}")
        dtype = DTYPES[dtype_name]
        file = self.path / f"{ref}.raw"
        try:
            raw = file.read_bytes()
        except FileNotFoundError:
            raise FormatError(f"missing buffer {ref} ({file.name})") from None
        except OSError as err:
            raise ContainerIOError(str(err)) from err
        if len(raw) != length * dtype.itemsize:
            raise FormatError(
                f"buffer {ref} has {len(raw)} bytes, expected {length * dtype.itemsize}"
            )
        if dtype == np.bool_:
            arr = np.frombuffer(raw, np.uint8)
            if arr.size and arr.max() > 1:
                raise FormatError(f"buffer {ref} holds bool8 values other than 0 and 1")
            arr = arr.view(np.bool_)
        else:
            arr = np.frombuffer(raw, dtype.newbyteorder("<")).astype(dtype, copy=False)
        return arr

    def node(self, doc, where="root") -> Layout:
        kind = _require(doc, "kind", where, str)
        length = _require(doc, "length", where, int)
        parameters = doc.get("parameters") or {}
        if not isinstance(parameters, dict):
            raise FormatError(f"parameters of {where} must be an object")
        try:
            node = self._build(kind, doc, where, length, parameters)
        except (TypeError, ValueError) as err:
            if isinstance(err, FormatError):
                raise
            raise FormatError(f"invalid node at {where}: {err}") from None
        if len(node) != length:
            raise FormatError(f"node at {where} has length {len(node)}, manifest says {length}")
        return node

    def _build(self, kind, doc, where, length, parameters) -> Layout:
        if kind == "empty":
            return EmptyArray(parameters)
        if kind == "numeric":
            dtype = _require(doc, "dtype", where, str)
            return NumericArray(self.buffer(_require(doc, "data", where), dtype), parameters)
        if kind == "listoffset":
            offsets = self.buffer(_require(doc, "offsets", where), "i64")
            content = self.node(_require(doc, "content", where, dict), where + ".content")
            return ListOffsetArray(offsets, content, parameters)
        if kind == "record":
            fields = []
            for i, f in enumerate(_require(doc, "fields", where, list)):
                name = _require(f, "name", f"{where}.fields[{i}]", str)
                sub = _require(f, "content", f"{where}.fields[{i}]", dict)
                fields.append((name, self.node(sub, f"{where}[{name!r}]")))
            return RecordArray(fields, length, parameters)
        if kind == "union":
            tags = self.buffer(_require(doc, "tags", where), "i8")
            index = self.buffer(_require(doc, "index", where), "i64")
            contents = [
                self.node(c, f"{where}.contents[{i}]")
                for i, c in enumerate(_require(doc, "contents", where, list))
            ]
            return UnionArray(tags, index, contents, parameters)
        if kind == "indexedoption":
            index = self.buffer(_require(doc, "index", where), "i64")
            content = self.node(_require(doc, "content", where, dict), where + ".content")
            return IndexedOptionArray(index, content, parameters)
        raise FormatError(f"unknown node kind {kind!r} at {where}")


def read(path) -> Layout:
    """Load a container written by :func:`write` and validate it."""
    path = Path(path)
    if not path.is_dir():
        raise ContainerIOError(f"{path} is not a container directory")
    try:
        text = (path / MANIFEST).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FormatError(f"{path} has no {MANIFEST}") from None
    except OSError as err:
        raise ContainerIOError(str(err)) from err
    except UnicodeDecodeError:
        raise FormatError(f"{MANIFEST} is not UTF-8") from None
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"{MANIFEST} is not valid JSON: {err}") from None
    version = _require(manifest, "version", "manifest")
    if version != VERSION or isinstance(version, bool):
        raise FormatError(f"unsupported version {version!r}")
    table = _require(manifest, "buffers", "manifest", dict)
    root = _require(manifest, "root", "manifest", dict)
    node = _Reader(path, table).node(root)
    return check(node)


def is_container(path) -> bool:
    return (Path(path) / MANIFEST).is_file()
