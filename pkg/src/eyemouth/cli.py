"""Command-line interface.

Exit codes: 0 success, 1 one or more features not detected, 2 usage,
format or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .evaluate import (CLASSES, DEFAULT_TOLERANCE, AnnotationError, SweepConfig,
                       load_annotations, parse_annotation_line, run_sweep)
from .facemodel import (DEFAULT_EYE_MARGIN, DEFAULT_MOUTH_WIDTH, FEATURES, SHAPES,
                        FaceBox, patch_schedule)
from .imgio import BoundsError, ImageFormatError, ensure_gray, image_size, read_image
from .matcher import DEFAULT_MIN_DIM, DEFAULT_REFINE_RADIUS, DetectOptions, detect
from .synth import generate_corpus
from .template import (DEFAULT_SIZE, METHODS, TemplateFormatError, build_template,
                       load_template, save_template)

EXIT_OK = 0
EXIT_DETECTION = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _fraction(lo, hi, lo_open=False, hi_open=False):
    def parse(text):
        v = float(text)
        bad = (v <= lo if lo_open else v < lo) or (v >= hi if hi_open else v > hi)
        if bad:
            lb = "(" if lo_open else "["
            rb = ")" if hi_open else "]"
            raise argparse.ArgumentTypeError(f"must be in {lb}{lo}, {hi}{rb}, got {v}")
        return v
    return parse


def _add_match_options(p):
    p.add_argument("--templates", required=True, metavar="DIR",
                   help="directory holding <method>_<feature>.tmpl files")
    p.add_argument("--eye-margin", type=_fraction(0.0, 0.5), default=DEFAULT_EYE_MARGIN,
                   help="eye scan-area growth per side, fraction of the half face "
                        "(default %(default).2f)")
    p.add_argument("--mouth-width", type=_fraction(0.0, 1.0, lo_open=True),
                   default=DEFAULT_MOUTH_WIDTH,
                   help="mouth scan-area width, fraction of the face width (default %(default).2f)")
    p.add_argument("--hierarchical", action="store_true",
                   help="coarse-to-fine pyramid scan instead of an exhaustive scan")
    p.add_argument("--refine-radius", type=_positive_int, default=DEFAULT_REFINE_RADIUS,
                   help="search radius per pyramid level in pixels (default %(default)s)")
    p.add_argument("--min-dim", type=int, default=DEFAULT_MIN_DIM,
                   help="smallest pyramid level side in pixels (default %(default)s)")
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1,
                   help="worker threads; results do not depend on it (default: CPU count)")


def _add_eval_options(p):
    _add_match_options(p)
    p.add_argument("--tolerance", type=_fraction(0.0, 1.0, hi_open=True),
                   default=DEFAULT_TOLERANCE,
                   help="allowed ground-truth overhang, fraction of the patch size "
                        "(default %(default).2f)")
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("-o", "--output", help="write the TSV report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eyemouth",
        description="Eye and mouth localization by normalized cross-correlation "
                    "template matching.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-template", help="average feature crops into a template")
    p.add_argument("crop_list", help="text file with one PGM/PPM crop path per line")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--feature", choices=FEATURES, required=True)
    p.add_argument("--size", type=int, default=DEFAULT_SIZE,
                   help="template side in pixels (default %(default)s)")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("detect", help="locate eyes and mouth in one image")
    p.add_argument("image")
    face = p.add_mutually_exclusive_group(required=True)
    face.add_argument("--face-rect", nargs=4, type=float, metavar=("X", "Y", "W", "H"))
    face.add_argument("--face-points", nargs=8, type=float,
                      metavar=("X1", "Y1", "X2", "Y2", "X3", "Y3", "X4", "Y4"))
    face.add_argument("--annotation-line", metavar="LINE",
                      help="one annotation record; its face points are used")
    p.add_argument("--method", choices=METHODS, default="haar")
    p.add_argument("--shape", choices=SHAPES, default="rectangular")
    p.add_argument("--step", type=int, default=0, help="patch schedule step (default 0)")
    _add_match_options(p)

    p = sub.add_parser("sweep", help="evaluate every step of the patch schedules")
    p.add_argument("annotations")
    p.add_argument("--shapes", nargs="+", choices=SHAPES, default=list(SHAPES))
    _add_eval_options(p)

    p = sub.add_parser("eval", help="evaluate one patch shape and step")
    p.add_argument("annotations")
    p.add_argument("--shape", choices=SHAPES, default="rectangular")
    p.add_argument("--step", type=int, default=0)
    _add_eval_options(p)

    p = sub.add_parser("gen-corpus", help="write a seeded synthetic face corpus")
    p.add_argument("out_dir")
    p.add_argument("-n", type=_positive_int, default=20, help="number of faces (default 20)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--template-size", type=int, default=DEFAULT_SIZE,
                   help="template side in pixels (default %(default)s)")
    p.add_argument("--no-templates", action="store_true",
                   help="skip building templates from the generated crops")
    return parser


def _load_templates(directory, methods):
    out = {}
    for method in methods:
        out[method] = {}
        for feat in FEATURES:
            path = os.path.join(directory, f"{method}_{feat}.tmpl")
            try:
                t = load_template(path)
            except OSError as exc:
                raise UsageError(f"cannot read template {path}: {exc.strerror}") from None
            if t.method != method or t.feature != feat:
                raise UsageError(f"{path} holds a {t.method}/{t.feature} template")
            out[method][feat] = t
    return out


def _detect_options(args) -> DetectOptions:
    return DetectOptions(eye_margin_frac=args.eye_margin, mouth_width_frac=args.mouth_width,
                         hierarchical=args.hierarchical, refine_radius=args.refine_radius,
                         min_dim=args.min_dim, workers=args.workers)


def cmd_build_template(args) -> int:
    base = os.path.dirname(os.path.abspath(args.crop_list))
    with open(args.crop_list, encoding="utf-8") as fh:
        paths = [ln.split("#", 1)[0].strip() for ln in fh]
    paths = [os.path.join(base, p) if not os.path.isabs(p) else p for p in paths if p]
    if not paths:
        raise UsageError(f"{args.crop_list}: crop list is empty")
    crops = []
    for p in paths:
        try:
            crops.append(ensure_gray(read_image(p)))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read crop {p}: {exc}") from None
    t = build_template(crops, args.method, args.feature, args.size)
    save_template(t, args.output)
    print(f"sample_count={t.sample_count} min={t.values.min():.6g} max={t.values.max():.6g}")
    return EXIT_OK


def _face_from_args(args) -> FaceBox:
    if args.face_rect is not None:
        x, y, w, h = args.face_rect
        return FaceBox.from_points([(x, y), (x + w, y), (x + w, y + h), (x, y + h)])
    if args.face_points is not None:
        pts = args.face_points
        return FaceBox.from_points(list(zip(pts[0::2], pts[1::2])))
    ann = parse_annotation_line(args.annotation_line, path="--annotation-line")
    if ann is None:
        raise UsageError("--annotation-line is empty")
    return ann.face


def cmd_detect(args) -> int:
    img = read_image(args.image)
    face = _face_from_args(args)
    w, h = image_size(img)
    if not face.rect.inside(w, h):
        raise BoundsError(f"face box {face.rect.as_tuple()} outside {w}x{h} image")
    schedule = patch_schedule(args.shape, face.rect.w)
    if not 0 <= args.step < len(schedule):
        raise UsageError(f"--step must be in [0, {len(schedule) - 1}] for {args.shape}")
    templates = _load_templates(args.templates, [args.method])[args.method]
    results = detect(img, face, args.method, schedule[args.step], templates,
                     _detect_options(args))
    status = EXIT_OK
    for feat, r in results.items():
        if r.ok:
            x, y, pw, ph = r.patch.as_tuple()
            print(f"{feat} {x} {y} {pw} {ph} {r.score:.6f}")
        else:
            print(f"{feat}: {r.error}", file=sys.stderr)
            status = EXIT_DETECTION
    return status


def _run_report(args, shapes, steps) -> int:
    corpus = load_annotations(args.annotations)
    templates = _load_templates(args.templates, args.methods)
    size = next(iter(templates[args.methods[0]].values())).size
    cfg = SweepConfig(tolerance_frac=args.tolerance, detect=_detect_options(args),
                      template_size=size, workers=args.workers)
    report = run_sweep(corpus, args.methods, shapes, templates, cfg, steps)
    text = report.to_tsv()
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    return _run_report(args, args.shapes, None)


def cmd_eval(args) -> int:
    n = len(patch_schedule(args.shape, 100))
    if not 0 <= args.step < n:
        raise UsageError(f"--step must be in [0, {n - 1}] for {args.shape}")
    return _run_report(args, [args.shape], [args.step])


def cmd_gen_corpus(args) -> int:
    anns = generate_corpus(args.n, args.seed, args.out_dir,
                           templates=not args.no_templates, template_size=args.template_size)
    counts = {c: sum(a.klass == c for a in anns) for c in CLASSES}
    print(f"wrote {len(anns)} images to {args.out_dir} "
          + " ".join(f"{c}={counts[c]}" for c in CLASSES))
    return EXIT_OK


COMMANDS = {
    "build-template": cmd_build_template,
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "eval": cmd_eval,
    "gen-corpus": cmd_gen_corpus,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, AnnotationError, TemplateFormatError, ImageFormatError,
            BoundsError, ValueError, OSError) as exc:
        print(f"eyemouth {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
