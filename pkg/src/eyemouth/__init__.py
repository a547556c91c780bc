"""Eye and mouth localization inside a face box by normalized cross-correlation
template matching on grayscale or horizontal-Haar images."""

from .evaluate import (Annotation, EvalReport, SweepConfig, accuracy, class_average,
                       judge, load_annotations, run_sweep)
from .facemodel import FEATURES, FaceBox, FacePartition, PatchSpec, partition, patch_schedule
from .imgio import (BoundsError, ImageFormatError, Rect, SizeError, crop, read_image,
                    read_pgm, read_ppm, resize_bilinear, to_grayscale, write_pgm, write_ppm)
from .matcher import (DetectOptions, MatchResult, detect, ncc, scan_hierarchical,
                      scan_region)
from .synth import generate_corpus
from .template import Template, build_template, load_template, save_template
from .transform import build_pyramid, haar_horizontal

__version__ = "0.1.0"
