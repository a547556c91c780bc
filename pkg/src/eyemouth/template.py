"""Averaged feature templates and their text file format.

File layout (UTF-8, LF)::

    TMPL1
    <method> <feature> <size> <sample_count>
    <size lines of size space-separated decimals>
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .facemodel import FEATURES
from .imgio import SizeError, as_gray, resize_bilinear
from .transform import haar_horizontal

METHODS = ("grayscale", "haar")
MAGIC = "TMPL1"
DEFAULT_SIZE = 10


class TemplateFormatError(ValueError):
    """Raised for malformed template files; message carries the line number."""


@dataclass(frozen=True, eq=False)
class Template:
    method: str
    feature: str
    values: np.ndarray
    sample_count: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.feature not in FEATURES:
            raise ValueError(f"unknown feature {self.feature!r}")
        vals = as_gray(self.values)
        if vals.shape[0] != vals.shape[1] or vals.shape[0] < 2:
            raise SizeError(f"template must be square and at least 2x2, got {vals.shape}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def preprocess(img, method: str) -> np.ndarray:
    """Gray image as seen by ``method``: unchanged, or its Haar sub-band."""
    if method == "grayscale":
        return as_gray(img)
    if method == "haar":
        return haar_horizontal(img)
    raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")


def build_template(crops, method: str, feature: str, size: int = DEFAULT_SIZE) -> Template:
    """Pixel-wise mean of the preprocessed crops resized to ``size`` x ``size``.

    For the Haar method each crop is transformed before it is resized.
    Summation runs left to right over ``crops``.
    """
    crops = list(crops)
    if not crops:
        raise ValueError("build_template needs at least one crop")
    if size < 2:
        raise SizeError(f"template size must be >= 2, got {size}")
    total = np.zeros((size, size))
    for k, c in enumerate(crops):
        g = as_gray(c)
        if min(g.shape) < 2:
            raise SizeError(f"crop {k} is {g.shape[1]}x{g.shape[0]}, need at least 2x2")
        total += resize_bilinear(preprocess(g, method), size, size)
    return Template(method, feature, total / len(crops), len(crops))


def save_template(t: Template, path) -> None:
    lines = [MAGIC, f"{t.method} {t.feature} {t.size} {t.sample_count}"]
    # ten significant digits keep |error| under 1e-7 for values up to 999
    for row in t.values:
        lines.append(" ".join(f"{v:.10g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_template(path) -> Template:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    def fail(lineno, msg):
        raise TemplateFormatError(f"{path}:{lineno}: {msg}")

    if not lines or lines[0].strip() != MAGIC:
        fail(1, f"bad magic {lines[0].strip() if lines else ''!r}, expected {MAGIC}")
    if len(lines) < 2:
        fail(2, "missing header line")
    head = lines[1].split()
    if len(head) != 4:
        fail(2, f"header needs 4 fields, got {len(head)}")
    method, feature, size_tok, count_tok = head
    if method not in METHODS:
        fail(2, f"unknown method {method!r}")
    if feature not in FEATURES:
        fail(2, f"unknown feature {feature!r}")
    try:
        size = int(size_tok)
        count = int(count_tok)
    except ValueError:
        fail(2, "size and sample_count must be integers")
    if size < 2 or count < 1:
        fail(2, f"invalid size {size} or sample_count {count}")

    rows = lines[2:]
    values = []
    for i, line in enumerate(rows[:size]):
        lineno = i + 3
        toks = line.split()
        if len(toks) != size:
            fail(lineno, f"expected {size} values, got {len(toks)}")
        try:
            values.append([float(t) for t in toks])
        except ValueError:
            fail(lineno, f"non-numeric token in {line!r}")
    if len(values) < size:
        fail(len(lines) + 1, f"expected {size} value rows, got {len(values)}")
    extra = [ln for ln in rows[size:] if ln.strip()]
    if extra:
        fail(size + 3, "unexpected data after the last value row")
    arr = np.array(values)
    if not np.all(np.isfinite(arr)):
        fail(3, "non-finite template value")
    return Template(method, feature, arr, count)
