"""Seeded synthetic face corpus used in place of a licensed face database.

Each image holds one frontal cartoon face on a textured background. The
eyes (with brows) and the mouth (with nostrils) are drawn inside
ground-truth boxes whose size is 82-94 % of the original rectangular patch
for that feature, so the original patch can contain them while patches
shrunk by 20-30 % mostly cannot.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .evaluate import CLASSES, Annotation, format_annotation
from .facemodel import FEATURES, FaceBox, patch_schedule, round_half_away
from .imgio import Rect, crop, read_pgm, resize_bilinear, to_grayscale, write_pgm, write_ppm
from .template import METHODS, build_template, save_template

IMAGE_W = 512
IMAGE_H = 768
BLUR_SIGMA = 3.0


@dataclass
class SynthFace:
    rgb: np.ndarray
    annotation: Annotation


def _smooth_noise(rng, h, w, cells, amp):
    coarse = rng.normal(0.0, amp, size=(cells, cells))
    return resize_bilinear(coarse, w, h)


def _ellipse(xx, yy, cx, cy, ax, ay):
    return ((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2 <= 1.0


def _paint(img, mask, color, alpha=1.0):
    img[mask] = (1.0 - alpha) * img[mask] + alpha * np.asarray(color, dtype=float)


def _draw_eye(img, gt: Rect, rng, spectacles: bool):
    x, y, gw, gh = gt.as_tuple()
    yy, xx = np.mgrid[y:y + gh, x:x + gw].astype(float) + 0.5
    sub = img[y:y + gh, x:x + gw]
    cx = x + gw / 2.0
    hair = rng.uniform(20, 55)
    # brow: a slightly arched bar across the top of the box
    arch = 0.06 * gh * (1.0 - ((xx - cx) / (0.5 * gw)) ** 2)
    brow = (yy - y + arch >= 0.02 * gh) & (yy - y + arch <= 0.20 * gh) \
        & (np.abs(xx - cx) <= 0.47 * gw)
    _paint(sub, brow, (hair, hair * 0.8, hair * 0.6))
    ecy = y + 0.72 * gh
    lid = _ellipse(xx, yy, cx, ecy, 0.44 * gw, 0.25 * gh)
    _paint(sub, lid, (60, 40, 35))
    sclera = _ellipse(xx, yy, cx, ecy, 0.40 * gw, 0.20 * gh)
    _paint(sub, sclera, (235, 232, 228))
    iris_x = cx + rng.uniform(-0.05, 0.05) * gw
    iris = _ellipse(xx, yy, iris_x, ecy, 0.17 * gh, 0.17 * gh) & sclera
    tone = rng.uniform(30, 90)
    _paint(sub, iris, (tone * 0.7, tone * 0.8, tone))
    pupil = _ellipse(xx, yy, iris_x, ecy, 0.07 * gh, 0.07 * gh)
    _paint(sub, pupil, (10, 10, 10))
    if spectacles:
        outer = _ellipse(xx, yy, cx, y + 0.64 * gh, 0.49 * gw, 0.36 * gh)
        inner = _ellipse(xx, yy, cx, y + 0.64 * gh, 0.45 * gw, 0.31 * gh)
        _paint(sub, outer & ~inner, (25, 25, 30))


def _draw_mouth(img, gt: Rect, rng):
    x, y, gw, gh = gt.as_tuple()
    yy, xx = np.mgrid[y:y + gh, x:x + gw].astype(float) + 0.5
    sub = img[y:y + gh, x:x + gw]
    cx = x + gw / 2.0
    shade = _ellipse(xx, yy, cx, y + 0.14 * gh, 0.26 * gw, 0.14 * gh)
    _paint(sub, shade, (120, 80, 70), alpha=0.35)
    for side in (-1, 1):
        nostril = _ellipse(xx, yy, cx + side * 0.13 * gw, y + 0.16 * gh, 0.06 * gw, 0.06 * gh)
        _paint(sub, nostril, (45, 25, 25))
    red = rng.uniform(150, 200)
    lips = _ellipse(xx, yy, cx, y + 0.72 * gh, 0.48 * gw, 0.24 * gh)
    _paint(sub, lips, (red, red * 0.45, red * 0.45))
    line = _ellipse(xx, yy, cx, y + 0.72 * gh, 0.44 * gw, 0.035 * gh)
    _paint(sub, line, (50, 15, 20))


def _draw_hair(img, face: Rect, brow_top: int, rng):
    """Dark fringe from the face top down to just above the brows."""
    x, y, w, _ = face.as_tuple()
    bottom = max(y + 1, brow_top - 2)
    yy, xx = np.mgrid[y:bottom, x:x + w].astype(float) + 0.5
    sub = img[y:bottom, x:x + w]
    hair = rng.uniform(15, 45)
    ragged = bottom - (bottom - y) * 0.25 * (1 + np.sin(xx / rng.uniform(4, 9)))
    _paint(sub, yy <= ragged, (hair, hair * 0.85, hair * 0.7))
    strands = (np.sin(xx * 0.9 + rng.uniform(0, 6)) > 0.6) & (yy <= bottom)
    _paint(sub, strands, (hair * 0.5, hair * 0.5, hair * 0.5), alpha=0.6)


def make_face(rng, klass: str, width: int = IMAGE_W, height: int = IMAGE_H) -> SynthFace:
    """Draw one synthetic face; image path in the annotation is left empty."""
    bg = rng.uniform(60, 200, size=3)
    img = np.empty((height, width, 3))
    for c in range(3):
        img[..., c] = bg[c] + _smooth_noise(rng, height, width, 12, 30.0)

    wf = int(rng.integers(180, 241))
    hf = round_half_away(wf * rng.uniform(1.25, 1.35))
    x0 = int(rng.integers(int(0.12 * wf), width - wf - int(0.12 * wf)))
    y0 = int(rng.integers(int(0.12 * hf), height - hf - int(0.12 * hf)))
    face = Rect(x0, y0, wf, hf)

    yy, xx = np.mgrid[0:height, 0:width].astype(float) + 0.5
    skin = np.array([rng.uniform(170, 235), rng.uniform(120, 180), rng.uniform(90, 150)])
    head = _ellipse(xx, yy, x0 + wf / 2, y0 + hf / 2, wf / 2, hf / 2)
    shading = _smooth_noise(rng, height, width, 8, 8.0)
    for c in range(3):
        chan = img[..., c]
        chan[head] = skin[c] + shading[head]

    spec = patch_schedule("rectangular", wf)[0]
    gt = {}
    for feat, cx_frac in (("right_eye", 0.25), ("left_eye", 0.75)):
        gw = round_half_away(spec.eye_w * rng.uniform(0.82, 0.94))
        gh = round_half_away(spec.eye_h * rng.uniform(0.82, 0.94))
        cx = x0 + wf * (cx_frac + rng.uniform(-0.02, 0.02))
        cy = y0 + wf * (0.36 + rng.uniform(-0.03, 0.03))
        gt[feat] = Rect(round_half_away(cx - gw / 2), round_half_away(cy - gh / 2), gw, gh)
    gw = round_half_away(spec.mouth_w * rng.uniform(0.82, 0.94))
    gh = round_half_away(spec.mouth_h * rng.uniform(0.82, 0.94))
    cx = x0 + wf * (0.5 + rng.uniform(-0.015, 0.015))
    cy = y0 + wf * (0.97 + rng.uniform(-0.03, 0.03))
    gt["mouth"] = Rect(round_half_away(cx - gw / 2), round_half_away(cy - gh / 2), gw, gh)

    if klass == "long_hair":
        _draw_hair(img, face, min(gt["right_eye"].y, gt["left_eye"].y), rng)
    for feat in ("right_eye", "left_eye"):
        _draw_eye(img, gt[feat], rng, spectacles=(klass == "spectacles"))
    _draw_mouth(img, gt["mouth"], rng)

    # soft edges, as in a photograph; keeps Haar responses wider than one pixel
    img = ndimage.gaussian_filter(img, sigma=(BLUR_SIGMA, BLUR_SIGMA, 0))
    img += rng.normal(0.0, 3.0, size=img.shape)
    rgb = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    ann = Annotation("", FaceBox.from_rect(*face.as_tuple()), gt, klass)
    return SynthFace(rgb, ann)


def feature_crop_rect(ann: Annotation, feature: str) -> Rect:
    """Original rectangular patch centred on a feature's ground-truth box."""
    spec = patch_schedule("rectangular", ann.face.rect.w)[0]
    pw, ph = spec.dims(feature)
    g = ann.gt_rect(feature)
    x = round_half_away(g.x + g.w / 2 - pw / 2)
    y = round_half_away(g.y + g.h / 2 - ph / 2)
    return Rect(x, y, pw, ph)


def generate_corpus(n: int, seed: int, out_dir, templates: bool = True,
                    template_size: int = 10) -> list[Annotation]:
    """Write ``n`` faces, ``annotations.txt``, feature crops and (optionally) templates.

    Layout under ``out_dir``::

        img_000.ppm ...            face images
        annotations.txt            one record per image
        crops/<feature>_000.pgm    gray crops centred on each feature
        crops/<feature>.txt        crop list per feature
        templates/<method>_<feature>.tmpl
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    os.makedirs(out_dir, exist_ok=True)
    crop_dir = os.path.join(out_dir, "crops")
    os.makedirs(crop_dir, exist_ok=True)
    rng = np.random.default_rng(seed)

    anns = []
    crops = {f: [] for f in FEATURES}
    lines = [f"# synthetic corpus n={n} seed={seed}",
             "# image x1 y1 x2 y2 x3 y3 x4 y4 le(x y w h) re(x y w h) mouth(x y w h) class",
             "# mouth boxes span nostrils to lower lip; eye boxes include brows"]
    for i in range(n):
        klass = CLASSES[i % len(CLASSES)]
        face = make_face(rng, klass)
        name = f"img_{i:03d}.ppm"
        write_ppm(face.rgb, os.path.join(out_dir, name))
        ann = Annotation(os.path.join(out_dir, name), face.annotation.face,
                         face.annotation.gt, klass, i + 1)
        anns.append(ann)
        lines.append(format_annotation(ann, name))
        gray = to_grayscale(face.rgb)
        for feat in FEATURES:
            c = crop(gray, feature_crop_rect(ann, feat))
            cname = f"{feat}_{i:03d}.pgm"
            write_pgm(c, os.path.join(crop_dir, cname))
            crops[feat].append(cname)

    with open(os.path.join(out_dir, "annotations.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    for feat in FEATURES:
        with open(os.path.join(crop_dir, f"{feat}.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(crops[feat]) + "\n")

    if templates:
        tdir = os.path.join(out_dir, "templates")
        os.makedirs(tdir, exist_ok=True)
        for feat in FEATURES:
            data = [read_pgm(os.path.join(crop_dir, c)) for c in crops[feat]]
            for method in METHODS:
                t = build_template(data, method, feat, template_size)
                save_template(t, os.path.join(tdir, f"{method}_{feat}.tmpl"))
    return anns
