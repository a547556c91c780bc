"""Correlation scoring, exhaustive patch scanning and coarse-to-fine scanning.

Every scan obeys the same observable contract: each candidate patch is
cropped, bilinearly resized to the template size and scored with the
zero-mean normalized correlation coefficient. The best score wins; ties
(scores within TIE_ATOL of the best) go to the first position in
row-major order (y, then x).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .facemodel import FEATURES, FaceBox, PatchSpec, partition
from .facemodel import DEFAULT_EYE_MARGIN, DEFAULT_MOUTH_WIDTH
from .imgio import Rect, SizeError, BoundsError, as_gray, ensure_gray, linear_weights
from .template import Template, preprocess
from .transform import build_pyramid

# A sum of squared deviations at or below FLAT_RTOL * (sum of squares) is
# treated as zero variance. Rounding noise on a constant window sits near
# 1e-32 relative; any 8-bit texture sits above 1e-10.
FLAT_RTOL = 1e-20

# Scores this close to the maximum count as tied. Mathematically equal
# scores (e.g. windows that are affine copies of each other) can differ
# by a few ulps depending on summation order.
TIE_ATOL = 1e-12

MIN_COARSE_PATCH = 4
DEFAULT_REFINE_RADIUS = 2
DEFAULT_MIN_DIM = 20

# positions scored per vectorized block
_BLOCK_POSITIONS = 16384


@dataclass(frozen=True)
class MatchResult:
    patch: Rect | None
    score: float | None
    feature: str | None = None
    method: str | None = None
    spec: PatchSpec | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _template_values(template) -> np.ndarray:
    if isinstance(template, Template):
        return template.values
    return as_gray(template)


def _is_flat(ssd, sumsq):
    return ssd <= FLAT_RTOL * sumsq


def ncc(window, template) -> float:
    """Correlation coefficient between a window and a same-sized template.

    Returns 0.0 when either side has (numerically) zero variance.
    """
    f = as_gray(window)
    t = _template_values(template)
    if f.shape != t.shape:
        raise SizeError(f"window {f.shape} and template {t.shape} differ in size")
    n = f.size
    fm = f.sum() / n
    tm = t.sum() / n
    fd = f - fm
    td = t - tm
    sf = float((fd * fd).sum())
    st = float((td * td).sum())
    if _is_flat(sf, sf + n * fm * fm) or _is_flat(st, st + n * tm * tm):
        return 0.0
    g = float((fd * td).sum()) / math.sqrt(sf * st)
    return min(1.0, max(-1.0, g))


class _Scorer:
    """Scores every patch position of a rectangular position window.

    Each resized window is produced with the same two-tap arithmetic as
    ``resize_bilinear``, so a position's 10x10 samples are bit-identical
    to cropping and resizing that patch by hand.
    """

    def __init__(self, img, pw, ph, template):
        self.img = img
        self.pw = pw
        self.ph = ph
        t = _template_values(template)
        self.n = t.shape[0]
        n2 = t.size
        tm = t.sum() / n2
        self.tc = (t - tm).ravel()
        self.tss = float((self.tc * self.tc).sum())
        self.template_flat = _is_flat(self.tss, self.tss + n2 * tm * tm)
        self.cols = linear_weights(pw, self.n)
        self.rows = linear_weights(ph, self.n)

    def score_block(self, x0, x1, y0, y1) -> np.ndarray:
        """Scores for top-left positions x in [x0, x1), y in [y0, y1)."""
        nx, ny = x1 - x0, y1 - y0
        if self.template_flat:
            return np.zeros((ny, nx))
        sub = self.img[y0:y1 - 1 + self.ph, x0:x1 - 1 + self.pw]
        horiz = []
        for lo, hi, fr in zip(*self.cols):
            a = sub[:, lo:lo + nx]
            v = np.subtract(sub[:, hi:hi + nx], a)
            v *= fr
            v += a
            horiz.append(v)
        samples = []
        total = np.zeros((ny, nx))
        for lo, hi, fr in zip(*self.rows):
            for h in horiz:
                a = h[lo:lo + ny]
                v = np.subtract(h[hi:hi + ny], a)
                v *= fr
                v += a
                samples.append(v)
                total += v
        n2 = len(samples)
        mean = total / n2
        ssd = np.zeros((ny, nx))
        cross = np.zeros((ny, nx))
        d = np.empty((ny, nx))
        sq = np.empty((ny, nx))
        for v, tk in zip(samples, self.tc):
            np.subtract(v, mean, out=d)
            np.multiply(d, d, out=sq)
            ssd += sq
            np.multiply(d, tk, out=sq)
            cross += sq
        flat = _is_flat(ssd, ssd + n2 * mean * mean)
        denom = np.sqrt(np.where(flat, 1.0, ssd) * self.tss)
        score = np.where(flat, 0.0, cross / denom)
        return np.clip(score, -1.0, 1.0)


def _blocks(x0, x1, y0, y1):
    nx = x1 - x0
    rows = max(1, _BLOCK_POSITIONS // max(nx, 1))
    return [(x0, x1, y, min(y + rows, y1)) for y in range(y0, y1, rows)]


def _scan_positions(img, pw, ph, template, x0, x1, y0, y1, workers=1):
    """Best (score, x, y) over top-left positions in a half-open window."""
    scorer = _Scorer(img, pw, ph, template)
    blocks = _blocks(x0, x1, y0, y1)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(lambda b: scorer.score_block(*b), blocks))
    else:
        scores = [scorer.score_block(*b) for b in blocks]
    # blocks cover whole rows, so stacking restores row-major order
    s = np.vstack(scores)
    top = float(s.max())
    k = int(np.argmax(s >= top - TIE_ATOL))
    iy, ix = divmod(k, s.shape[1])
    return float(s[iy, ix]), x0 + ix, y0 + iy


def _check_scan(img, region, pw, ph):
    h, w = img.shape
    if not region.inside(w, h):
        raise BoundsError(f"region {region.as_tuple()} outside {w}x{h} image")
    if pw < 1 or ph < 1:
        raise SizeError(f"patch size must be >= 1, got {pw}x{ph}")
    if pw > region.w or ph > region.h:
        raise SizeError(
            f"patch {pw}x{ph} larger than scan region {region.w}x{region.h}")


def scan_region(img, region: Rect, patch_w: int, patch_h: int, template,
                workers: int = 1) -> MatchResult:
    """Exhaustive scan of every patch position fully inside ``region``.

    Parameters
    ----------
    img : array_like
        Preprocessed gray image.
    region : Rect
        Scan area in image coordinates.
    patch_w, patch_h : int
        Patch size; each patch is resized to the template size before scoring.
    template : Template or array_like
        Square template.
    workers : int
        Thread count. The result does not depend on it.
    """
    img = as_gray(img)
    _check_scan(img, region, patch_w, patch_h)
    score, x, y = _scan_positions(
        img, patch_w, patch_h, template,
        region.x, region.x2 - patch_w + 1, region.y, region.y2 - patch_h + 1, workers)
    return MatchResult(Rect(x, y, patch_w, patch_h), score)


def _level_geometry(level_img, region, pw, ph, level):
    """Region and patch size at pyramid ``level``, or None if unusable."""
    s = 2 ** level
    h, w = level_img.shape
    x0, y0 = region.x // s, region.y // s
    x1, y1 = min(region.x2 // s, w), min(region.y2 // s, h)
    lpw = max(MIN_COARSE_PATCH, int(round(pw / s)))
    lph = max(MIN_COARSE_PATCH, int(round(ph / s)))
    if x1 - x0 < lpw or y1 - y0 < lph:
        return None
    return Rect(x0, y0, x1 - x0, y1 - y0), lpw, lph


def coarsest_level(pyr, region: Rect, patch_w: int, patch_h: int,
                   template_size: int = 10) -> int:
    """Deepest pyramid level where the scaled patch still fits its region and
    is no smaller than the template (and never below 4 px).
    """
    floor = max(MIN_COARSE_PATCH, template_size)
    top = 0
    for level in range(1, len(pyr)):
        if min(patch_w, patch_h) / 2 ** level < floor:
            break
        if _level_geometry(pyr[level], region, patch_w, patch_h, level) is None:
            break
        top = level
    return top


def scan_hierarchical(pyr, region: Rect, patch_w: int, patch_h: int, template,
                      refine_radius: int = DEFAULT_REFINE_RADIUS,
                      workers: int = 1) -> MatchResult:
    """Coarse-to-fine scan over an image pyramid.

    The coarsest usable level is scanned exhaustively. Each finer level
    only scans positions within ``refine_radius`` of the doubled previous
    best. The returned patch and score are in level-0 terms.
    """
    if refine_radius < 1:
        raise ValueError(f"refine_radius must be >= 1, got {refine_radius}")
    base = as_gray(pyr[0])
    _check_scan(base, region, patch_w, patch_h)
    top = coarsest_level(pyr, region, patch_w, patch_h, _template_values(template).shape[0])
    if top == 0:
        return scan_region(base, region, patch_w, patch_h, template, workers)

    reg, lpw, lph = _level_geometry(pyr[top], region, patch_w, patch_h, top)
    _, bx, by = _scan_positions(pyr[top], lpw, lph, template,
                                reg.x, reg.x2 - lpw + 1, reg.y, reg.y2 - lph + 1, workers)
    score = 0.0
    for level in range(top - 1, -1, -1):
        if level == 0:
            reg, lpw, lph = region, patch_w, patch_h
        else:
            reg, lpw, lph = _level_geometry(pyr[level], region, patch_w, patch_h, level)
        xmin, xmax = reg.x, reg.x2 - lpw
        ymin, ymax = reg.y, reg.y2 - lph
        cx = min(max(2 * bx, xmin), xmax)
        cy = min(max(2 * by, ymin), ymax)
        score, bx, by = _scan_positions(
            pyr[level], lpw, lph, template,
            max(xmin, cx - refine_radius), min(xmax, cx + refine_radius) + 1,
            max(ymin, cy - refine_radius), min(ymax, cy + refine_radius) + 1, workers)
    return MatchResult(Rect(bx, by, patch_w, patch_h), score)


@dataclass
class DetectOptions:
    eye_margin_frac: float = DEFAULT_EYE_MARGIN
    mouth_width_frac: float = DEFAULT_MOUTH_WIDTH
    hierarchical: bool = False
    refine_radius: int = DEFAULT_REFINE_RADIUS
    min_dim: int = DEFAULT_MIN_DIM
    workers: int = 1


def detect(img, face: FaceBox, method: str, spec: PatchSpec, templates,
           options: DetectOptions | None = None) -> dict[str, MatchResult]:
    """Locate both eyes and the mouth inside ``face``.

    ``img`` may be RGB or already gray. ``templates`` maps feature name to
    a Template built with ``method``. A failure on one feature (for example
    a patch larger than its scan region) is reported in that feature's
    result and does not stop the others.

    Returns a dict ordered left_eye, right_eye, mouth.
    """
    opts = options or DetectOptions()
    gray = ensure_gray(img)
    h, w = gray.shape
    parts = partition(face, (w, h), opts.eye_margin_frac, opts.mouth_width_frac)
    for feat in FEATURES:
        t = templates[feat]
        if t.method != method:
            raise ValueError(f"{feat} template built for {t.method!r}, not {method!r}")
    work = preprocess(gray, method)
    pyr = None
    if opts.hierarchical:
        pyr = build_pyramid(work, opts.min_dim) if min(work.shape) >= opts.min_dim else [work]

    results = {}
    for feat in FEATURES:
        region = parts.region(feat)
        pw, ph = spec.dims(feat)
        try:
            if pyr is not None:
                r = scan_hierarchical(pyr, region, pw, ph, templates[feat],
                                      opts.refine_radius, opts.workers)
            else:
                r = scan_region(work, region, pw, ph, templates[feat], opts.workers)
            results[feat] = MatchResult(r.patch, r.score, feat, method, spec)
        except (SizeError, BoundsError) as exc:
            results[feat] = MatchResult(None, None, feat, method, spec, error=str(exc))
    return results
