"""Portable activation-trace storage: the ATRC binary format and JSON manifests.

ATRC is a fixed little-endian container for a row-major real matrix:

    offset  size  field
    0       4     magic ``b"ATRC"``
    4       2     version, u16 (currently 1)
    6       1     dtype code, u8 (1 = f32, 2 = f64)
    7       1     flags, u8 (0)
    8       4     reserved, u32 (0)
    12      8     rows, u64
    20      8     cols, u64
    28      -     rows*cols values, row-major

The header is exactly 28 bytes. Files round-trip bit-exactly regardless of
platform; all multi-byte fields are little-endian.

A dataset manifest is a JSON index binding per-label trace files (and
optional logits / true-label files) into one evaluation unit. Paths inside
a manifest are relative to the manifest file itself.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError, ManifestError

MAGIC = b"ATRC"
VERSION = 1
HEADER = struct.Struct("<4sHBBIQQ")
HEADER_SIZE = HEADER.size  # 28 bytes

_DTYPE_CODES = {1: np.dtype("<f4"), 2: np.dtype("<f8")}
_CODE_FOR_KIND = {np.dtype(np.float32): 1, np.dtype(np.float64): 2}


def as_trace_matrix(data, dtype=None) -> np.ndarray:
    """Validate and return ``data`` as a 2-D float matrix.

    Raises FormatError("invariant") if the array is not 2-D, has zero
    columns, contains non-finite values, or is not f32/f64.
    """
    m = np.asarray(data)
    if dtype is not None:
        m = m.astype(dtype, copy=False)
    if m.dtype not in _CODE_FOR_KIND:
        if m.dtype.kind in "fiu":
            m = m.astype(np.float64)
        else:
            raise FormatError("invariant", f"unsupported dtype {m.dtype}")
    if m.ndim != 2:
        raise FormatError("invariant", f"expected 2-D matrix, got ndim={m.ndim}")
    if m.shape[1] < 1:
        raise FormatError("invariant", "cols must be >= 1")
    if not np.all(np.isfinite(m)):
        raise FormatError("invariant", "matrix contains non-finite values")
    return m


def write_trace_matrix(m, path) -> None:
    """Write a matrix to ``path`` in ATRC format.

    The matrix is validated before the file is opened, so an invariant
    violation never leaves a partial file behind.
    """
    m = as_trace_matrix(m)
    code = _CODE_FOR_KIND[m.dtype]
    rows, cols = m.shape
    header = HEADER.pack(MAGIC, VERSION, code, 0, 0, rows, cols)
    payload = np.ascontiguousarray(m, dtype=_DTYPE_CODES[code]).tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def _parse_header(raw: bytes, path) -> tuple[np.dtype, int, int]:
    if len(raw) < HEADER_SIZE:
        raise FormatError("length", f"{path}: file shorter than the 28-byte header")
    magic, version, code, _flags, _reserved, rows, cols = HEADER.unpack(raw[:HEADER_SIZE])
    if magic != MAGIC:
        raise FormatError("magic", f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError("version", f"{path}: unsupported version {version}")
    if code not in _DTYPE_CODES:
        raise FormatError("dtype", f"{path}: unknown dtype code {code}")
    return _DTYPE_CODES[code], rows, cols


def read_header(path) -> tuple[np.dtype, int, int]:
    """Read only the (dtype, rows, cols) header of an ATRC file."""
    with open(path, "rb") as fh:
        return _parse_header(fh.read(HEADER_SIZE), path)


def read_trace_matrix(path) -> np.ndarray:
    """Read an ATRC file back into a matrix of the stored dtype.

    Round-trips ``write_trace_matrix`` output bit-exactly.
    """
    raw = Path(path).read_bytes()
    dtype, rows, cols = _parse_header(raw, path)
    expected = rows * cols * dtype.itemsize
    body = raw[HEADER_SIZE:]
    if len(body) != expected:
        raise FormatError(
            "length",
            f"{path}: payload holds {len(body)} bytes, header implies {expected}",
        )
    if cols < 1:
        raise FormatError("invariant", f"{path}: cols must be >= 1")
    data = np.frombuffer(body, dtype=dtype)
    return data.reshape(rows, cols)


def write_labels(values, path) -> None:
    """Store integer class labels as an N x 1 f32 ATRC file."""
    v = np.asarray(values)
    write_trace_matrix(v.reshape(-1, 1).astype(np.float32), path)


def load_labels(path, num_classes: int | None = None) -> np.ndarray:
    """Load a label file written by :func:`write_labels`.

    Values are cast to the nearest integer; if ``num_classes`` is given,
    entries outside [0, num_classes) raise FormatError("invariant").
    """
    m = read_trace_matrix(path)
    if m.shape[1] != 1:
        raise FormatError("invariant", f"{path}: label file must have cols=1")
    labels = np.rint(np.asarray(m[:, 0], dtype=np.float64)).astype(np.int64)
    if num_classes is not None:
        if num_classes < 2:
            raise FormatError("invariant", "num_classes must be >= 2")
        if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
            raise FormatError(
                "invariant", f"{path}: labels outside [0, {num_classes})"
            )
    return labels


@dataclass(frozen=True)
class ManifestEntry:
    label: str
    class_index: int
    trace_path: str
    count: int
    logits_path: str | None = None
    true_labels_path: str | None = None


@dataclass
class DatasetManifest:
    """Parsed dataset manifest; ``base_dir`` anchors the relative paths."""

    name: str
    entries: list[ManifestEntry]
    base_dir: Path = field(default_factory=Path)

    def entry(self, label: str) -> ManifestEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise ManifestError(label, "no such label in manifest")

    def resolve(self, rel: str) -> Path:
        return self.base_dir / rel

    def load_traces(self, e: ManifestEntry) -> np.ndarray:
        return read_trace_matrix(self.resolve(e.trace_path))

    def load_logits(self, e: ManifestEntry) -> np.ndarray:
        if e.logits_path is None:
            raise ManifestError(e.label, "manifest entry has no logits file")
        return read_trace_matrix(self.resolve(e.logits_path))

    def load_true_labels(self, e: ManifestEntry) -> np.ndarray:
        if e.true_labels_path is None:
            raise ManifestError(e.label, "manifest entry has no true-label file")
        return load_labels(self.resolve(e.true_labels_path))


def _check_rows(manifest: DatasetManifest, e: ManifestEntry, rel: str, want_rows: int):
    path = manifest.resolve(rel)
    if not path.is_file():
        raise ManifestError(e.label, f"referenced file missing: {rel}")
    try:
        _dtype, rows, _cols = read_header(path)
    except FormatError as err:
        raise ManifestError(e.label, f"unreadable ATRC file {rel}: {err}") from err
    if rows != want_rows:
        raise ManifestError(
            e.label, f"{rel} holds {rows} rows, manifest says count={want_rows}"
        )


def load_manifest(path) -> DatasetManifest:
    """Load and verify a dataset manifest.

    Every referenced file is opened and its row count checked against the
    entry's ``count``; duplicate class indices are rejected. Pure read,
    no side effects.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise ManifestError(str(path), f"cannot parse manifest: {err}") from err

    if not isinstance(doc, dict) or "entries" not in doc:
        raise ManifestError(str(path), "manifest must be an object with 'entries'")

    entries = []
    for raw in doc["entries"]:
        try:
            entries.append(
                ManifestEntry(
                    label=str(raw["label"]),
                    class_index=int(raw["class_index"]),
                    trace_path=str(raw["trace_path"]),
                    count=int(raw["count"]),
                    logits_path=raw.get("logits_path"),
                    true_labels_path=raw.get("true_labels_path"),
                )
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ManifestError(str(raw), f"bad manifest entry: {err}") from err

    manifest = DatasetManifest(
        name=str(doc.get("name", path.stem)),
        entries=entries,
        base_dir=path.parent,
    )

    seen = {}
    for e in entries:
        if e.class_index in seen:
            raise ManifestError(
                e.label, f"class_index {e.class_index} also used by {seen[e.class_index]!r}"
            )
        seen[e.class_index] = e.label
        _check_rows(manifest, e, e.trace_path, e.count)
        if e.logits_path is not None:
            _check_rows(manifest, e, e.logits_path, e.count)
        if e.true_labels_path is not None:
            _check_rows(manifest, e, e.true_labels_path, e.count)
    return manifest


def write_manifest(manifest: DatasetManifest, path) -> None:
    """Serialize a manifest to JSON (paths stay as given, i.e. relative)."""
    doc = {
        "name": manifest.name,
        "entries": [
            {
                "label": e.label,
                "class_index": e.class_index,
                "trace_path": e.trace_path,
                "logits_path": e.logits_path,
                "true_labels_path": e.true_labels_path,
                "count": e.count,
            }
            for e in manifest.entries
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
