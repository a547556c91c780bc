"""Judging detections against ground truth and aggregating accuracy tables."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .facemodel import FEATURES, FaceBox, patch_schedule
from .imgio import Rect, read_image, image_size
from .matcher import DetectOptions, detect

log = logging.getLogger(__name__)

CLASSES = ("normal", "long_hair", "spectacles")
DEFAULT_TOLERANCE = 0.10

# classes with a published counterpart per feature: eye rows appear for
# all three image classes, mouth rows only for normal faces
PUBLISHED = {
    "left_eye": CLASSES,
    "right_eye": CLASSES,
    "mouth": ("normal",),
}


class AnnotationError(ValueError):
    """Malformed annotation line; ``lineno`` is 1-based."""

    def __init__(self, path, lineno, msg):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.lineno = lineno


@dataclass(frozen=True)
class Annotation:
    image_path: str
    face: FaceBox
    gt: dict
    klass: str
    lineno: int = 0

    def gt_rect(self, feature: str) -> Rect:
        return self.gt[feature]


_N_FIELDS = 22


def parse_annotation_line(line: str, base_dir: str = "", path="<line>", lineno: int = 1):
    """Parse one record; returns None for blank/comment lines.

    Layout: ``image x1 y1 .. x4 y4 le(x y w h) re(x y w h) m(x y w h) class``.
    The mouth box is expected to span nostrils to lower lip.
    """
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    toks = text.split()
    if len(toks) != _N_FIELDS:
        raise AnnotationError(path, lineno, f"expected {_N_FIELDS} fields, got {len(toks)}")
    try:
        coords = [float(t) for t in toks[1:9]]
        boxes = [int(t) for t in toks[9:21]]
    except ValueError as exc:
        raise AnnotationError(path, lineno, f"bad number: {exc}") from None
    klass = toks[21]
    if klass not in CLASSES:
        raise AnnotationError(path, lineno, f"unknown class {klass!r}, expected one of {CLASSES}")
    try:
        face = FaceBox.from_points(list(zip(coords[0::2], coords[1::2])))
        gt = {
            "left_eye": Rect(*boxes[0:4]),
            "right_eye": Rect(*boxes[4:8]),
            "mouth": Rect(*boxes[8:12]),
        }
    except ValueError as exc:
        raise AnnotationError(path, lineno, str(exc)) from None
    image = toks[0]
    if base_dir and not os.path.isabs(image):
        image = os.path.join(base_dir, image)
    return Annotation(image, face, gt, klass, lineno)


def load_annotations(path) -> list[Annotation]:
    base = os.path.dirname(os.path.abspath(path))
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            ann = parse_annotation_line(line, base, path, lineno)
            if ann is not None:
                out.append(ann)
    return out


def format_annotation(ann: Annotation, image_name: str | None = None) -> str:
    pts = ann.face.points
    fields = [image_name or ann.image_path]
    fields += [f"{v:g}" for p in pts for v in p]
    for feat in ("left_eye", "right_eye", "mouth"):
        fields += [str(v) for v in ann.gt[feat].as_tuple()]
    fields.append(ann.klass)
    return " ".join(fields)


def judge(detected: Rect, gt: Rect, tolerance_frac: float = DEFAULT_TOLERANCE) -> bool:
    """True if ``gt`` lies inside ``detected`` grown by ``tolerance_frac`` per side."""
    if not 0.0 <= tolerance_frac < 1.0:
        raise ValueError(f"tolerance_frac must be in [0, 1), got {tolerance_frac}")
    ex = tolerance_frac * detected.w
    ey = tolerance_frac * detected.h
    return (gt.x >= detected.x - ex and gt.x2 <= detected.x2 + ex
            and gt.y >= detected.y - ey and gt.y2 <= detected.y2 + ey)


def accuracy(passes: int, total: int) -> float:
    """Percentage of successful detections."""
    if total < 1:
        raise ValueError("accuracy needs total >= 1")
    if not 0 <= passes <= total:
        raise ValueError(f"passes must be in [0, {total}], got {passes}")
    return 100.0 * passes / total


def class_average(nf: float, flh: float, fs: float) -> float:
    """Mean of the normal, long-hair and spectacles accuracies."""
    return (nf + flh + fs) / 3.0


@dataclass
class ReportRow:
    method: str
    shape: str
    step: int
    feature: str
    passes: dict = field(default_factory=lambda: {c: 0 for c in CLASSES})
    totals: dict = field(default_factory=lambda: {c: 0 for c in CLASSES})

    def accuracy(self, klass: str) -> float | None:
        if self.totals[klass] == 0:
            return None
        return accuracy(self.passes[klass], self.totals[klass])

    @property
    def average(self) -> float | None:
        """Mean over the classes that have at least one processed image."""
        accs = [a for a in (self.accuracy(c) for c in CLASSES) if a is not None]
        if not accs:
            return None
        if len(accs) == 3:
            return class_average(*accs)
        return sum(accs) / len(accs)


@dataclass
class EvalReport:
    config: dict
    rows: list
    warnings: list = field(default_factory=list)

    def row(self, method, shape, step, feature) -> ReportRow:
        for r in self.rows:
            if (r.method, r.shape, r.step, r.feature) == (method, shape, step, feature):
                return r
        raise KeyError((method, shape, step, feature))

    def to_tsv(self) -> str:
        lines = ["# " + "\t".join(f"{k}={v}" for k, v in self.config.items())]
        head = ["method", "shape", "step", "feature"]
        for c in CLASSES:
            head += [f"{c}_pass", f"{c}_total", f"{c}_acc"]
        head += ["average", "published"]
        lines.append("\t".join(head))
        for r in self.rows:
            cells = [r.method, r.shape, str(r.step), r.feature]
            for c in CLASSES:
                acc = r.accuracy(c)
                cells += [str(r.passes[c]), str(r.totals[c]), _pct(acc)]
            cells += [_pct(r.average), ",".join(PUBLISHED[r.feature])]
            lines.append("\t".join(cells))
        for w in self.warnings:
            lines.append(f"# skipped: {w}")
        return "\n".join(lines) + "\n"


def _pct(v):
    return "-" if v is None else f"{v:.2f}"


@dataclass
class SweepConfig:
    tolerance_frac: float = DEFAULT_TOLERANCE
    detect: DetectOptions = field(default_factory=DetectOptions)
    template_size: int = 10
    workers: int = 1

    def header(self) -> dict:
        d = self.detect
        return {
            "tolerance": f"{self.tolerance_frac:.2f}",
            "eye_margin": f"{d.eye_margin_frac:.2f}",
            "mouth_width": f"{d.mouth_width_frac:.2f}",
            "template_size": str(self.template_size),
            "hierarchical": "1" if d.hierarchical else "0",
            "refine_radius": str(d.refine_radius),
            "min_dim": str(d.min_dim),
        }


def _evaluate_one(ann, jobs, templates, cfg):
    """Pass/fail per (method, shape, step, feature) for one image."""
    try:
        img = read_image(ann.image_path)
    except (OSError, ValueError) as exc:
        return None, f"{ann.image_path}: {exc}"
    w, h = image_size(img)
    if not ann.face.rect.inside(w, h):
        return None, f"{ann.image_path}: face box {ann.face.rect.as_tuple()} outside image"
    opts = DetectOptions(**{**vars(cfg.detect), "workers": 1})
    outcome = {}
    for method, shape, step in jobs:
        try:
            spec = patch_schedule(shape, ann.face.rect.w)[step]
            res = detect(img, ann.face, method, spec, templates[method], opts)
        except ValueError as exc:
            return None, f"{ann.image_path}: {exc}"

        for feat in FEATURES:
            r = res[feat]
            ok = r.ok and judge(r.patch, ann.gt_rect(feat), cfg.tolerance_frac)
            outcome[(method, shape, step, feat)] = ok
    return outcome, None


def sweep_jobs(methods, shapes, steps=None):
    """(method, shape, step) triples in report order."""
    jobs = []
    for method in methods:
        for shape in shapes:
            n = len(patch_schedule(shape, 100))
            chosen = range(n) if steps is None else [s for s in steps if 0 <= s < n]
            for step in chosen:
                jobs.append((method, shape, step))
    return jobs


def run_sweep(corpus, methods, shapes, templates, config: SweepConfig | None = None,
              steps=None) -> EvalReport:
    """Detect and judge every image under every method and patch-schedule step.

    ``templates`` maps method -> {feature: Template}. Images that cannot be
    read are skipped with a warning and excluded from totals.
    """
    cfg = config or SweepConfig()
    jobs = sweep_jobs(methods, shapes, steps)
    for method in {j[0] for j in jobs}:
        if method not in templates:
            raise ValueError(f"no templates for method {method!r}")
    rows = [ReportRow(m, s, k, f) for m, s, k in jobs for f in FEATURES]
    index = {(r.method, r.shape, r.step, r.feature): r for r in rows}
    report = EvalReport(cfg.header(), rows)
    if not jobs:
        return report

    def work(ann):
        return _evaluate_one(ann, jobs, templates, cfg)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(work, corpus))
    else:
        outcomes = [work(a) for a in corpus]

    for ann, (outcome, warning) in zip(corpus, outcomes):
        if outcome is None:
            log.warning("skipping %s", warning)
            report.warnings.append(warning)
            continue
        for key, ok in outcome.items():
            row = index[key]
            row.totals[ann.klass] += 1
            row.passes[ann.klass] += int(ok)
    return report
