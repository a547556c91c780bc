"""Face-box partition and patch-size schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .imgio import BoundsError, Rect

FEATURES = ("left_eye", "right_eye", "mouth")
SHAPES = ("rectangular", "square")

DEFAULT_EYE_MARGIN = 0.10
DEFAULT_MOUTH_WIDTH = 0.60

# width multipliers relative to the original patch width
_RECT_STEPS = (Fraction("1.0"), Fraction("0.9"), Fraction("0.8"), Fraction("0.7"))
_RECT_ASPECT = Fraction("0.8")
# (eye side, mouth side) as fractions of the face width, printed as-is
_SQUARE_STEPS = (
    (Fraction("0.50"), Fraction("0.50")),
    (Fraction("0.45"), Fraction("0.45")),
    (Fraction("0.45"), Fraction("0.55")),
)


def round_half_away(value) -> int:
    """Nearest integer, ties away from zero."""
    if isinstance(value, Fraction):
        mag = math.floor(abs(value) + Fraction(1, 2))
    else:
        mag = math.floor(abs(value) + 0.5)
    return int(mag) if value >= 0 else -int(mag)


@dataclass(frozen=True)
class FaceBox:
    rect: Rect
    points: tuple[tuple[float, float], ...] = ()

    @classmethod
    def from_points(cls, points) -> "FaceBox":
        """Bounding box of the (usually four) clicked corner points."""
        pts = tuple((float(x), float(y)) for x, y in points)
        if len(pts) < 2:
            raise ValueError("a face box needs at least two points")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        x0, y0 = round_half_away(min(xs)), round_half_away(min(ys))
        x1, y1 = round_half_away(max(xs)), round_half_away(max(ys))
        return cls(Rect(x0, y0, x1 - x0, y1 - y0), pts)

    @classmethod
    def from_rect(cls, x, y, w, h) -> "FaceBox":
        r = Rect(int(x), int(y), int(w), int(h))
        corners = ((r.x, r.y), (r.x2, r.y), (r.x2, r.y2), (r.x, r.y2))
        return cls(r, tuple((float(a), float(b)) for a, b in corners))


@dataclass(frozen=True)
class FacePartition:
    right_eye: Rect
    left_eye: Rect
    mouth: Rect

    def region(self, feature: str) -> Rect:
        return getattr(self, feature)


@dataclass(frozen=True)
class PatchSpec:
    shape: str
    step: int
    eye_w: int
    eye_h: int
    mouth_w: int
    mouth_h: int

    def dims(self, feature: str) -> tuple[int, int]:
        """(width, height) of the patch used for ``feature``."""
        if feature == "mouth":
            return self.mouth_w, self.mouth_h
        return self.eye_w, self.eye_h

    @property
    def label(self) -> str:
        return f"{self.shape}:{self.step}"


def _fit(lo: float, hi: float, limit: int) -> tuple[int, int]:
    """Round an interval's edges, then slide it inside ``[0, limit]``.

    Oversized intervals are cut down to the full range.
    """
    a, b = round_half_away(lo), round_half_away(hi)
    length = min(b - a, limit)
    a = min(max(a, 0), limit - length)
    return a, a + length


def partition(face: FaceBox, image_size, eye_margin_frac: float = DEFAULT_EYE_MARGIN,
              mouth_width_frac: float = DEFAULT_MOUTH_WIDTH) -> FacePartition:
    """Split a face box into right-eye, left-eye and mouth scan regions.

    The upper half is cut into two eye regions (the subject's right eye is
    on the image's left), each grown by ``eye_margin_frac`` of its own size
    on every side and moved back inside the image if it spills over. The
    mouth region is the lower half, narrowed to ``mouth_width_frac`` of the
    face width and centred.
    """
    width, height = image_size
    r = face.rect
    if not r.inside(width, height):
        raise BoundsError(f"face box {r.as_tuple()} outside {width}x{height} image")
    if not 0.0 <= eye_margin_frac <= 0.5:
        raise ValueError(f"eye_margin_frac must be in [0, 0.5], got {eye_margin_frac}")
    if not 0.0 < mouth_width_frac <= 1.0:
        raise ValueError(f"mouth_width_frac must be in (0, 1], got {mouth_width_frac}")

    half_w = r.w / 2.0
    half_h = r.h / 2.0
    mx = eye_margin_frac * half_w
    my = eye_margin_frac * half_h
    mid_x = r.x + half_w
    mid_y = r.y + half_h

    ey0, ey1 = _fit(r.y - my, mid_y + my, height)
    rx0, rx1 = _fit(r.x - mx, mid_x + mx, width)
    lx0, lx1 = _fit(mid_x - mx, r.x2 + mx, width)

    # x and width rounded separately so the width matches a patch of the same fraction
    mouth_w = max(1, round_half_away(mouth_width_frac * r.w))
    mouth_x = round_half_away(r.x + r.w * (1.0 - mouth_width_frac) / 2.0)
    mouth_x = max(0, min(mouth_x, width - mouth_w))
    my0 = round_half_away(mid_y)
    return FacePartition(
        right_eye=Rect(rx0, ey0, rx1 - rx0, ey1 - ey0),
        left_eye=Rect(lx0, ey0, lx1 - lx0, ey1 - ey0),
        mouth=Rect(mouth_x, my0, mouth_w, max(r.y2 - my0, 1)),
    )


def _dim(value) -> int:
    return max(1, round_half_away(value))


def patch_schedule(shape: str, face_width: int) -> list[PatchSpec]:
    """Patch sizes for every reduction step of ``shape``.

    Rectangular: eye width 0.5 and mouth width 0.6 of the face width,
    shrunk to 90/80/70 % of the original width, each height 0.8 of its
    own (rounded) width. Square: sides 0.50, 0.45, then 0.45 (eye) and
    0.55 (mouth) of the face width.
    """
    if face_width < 20:
        raise ValueError(f"face_width must be >= 20, got {face_width}")
    wf = Fraction(int(face_width))
    specs = []
    if shape == "rectangular":
        for step, scale in enumerate(_RECT_STEPS):
            eye_w = _dim(scale * Fraction("0.5") * wf)
            mouth_w = _dim(scale * Fraction("0.6") * wf)
            specs.append(PatchSpec(shape, step,
                                   eye_w, _dim(_RECT_ASPECT * eye_w),
                                   mouth_w, _dim(_RECT_ASPECT * mouth_w)))
    elif shape == "square":
        for step, (eye, mouth) in enumerate(_SQUARE_STEPS):
            e = _dim(eye * wf)
            m = _dim(mouth * wf)
            specs.append(PatchSpec(shape, step, e, e, m, m))
    else:
        raise ValueError(f"unknown patch shape {shape!r}, expected one of {SHAPES}")
    return specs
