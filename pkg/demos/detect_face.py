"""
Detecting eyes and mouth on a synthetic face
============================================

Draws one seeded face, builds templates from a small corpus, then runs
the exhaustive and the coarse-to-fine scan.
"""

import os
import tempfile
import time

import numpy as np

from eyemouth import DetectOptions, detect, generate_corpus, judge, load_template, patch_schedule
from eyemouth.synth import make_face

work = tempfile.mkdtemp()
generate_corpus(12, 5, work)  # 12 faces plus templates/<method>_<feature>.tmpl

face = make_face(np.random.default_rng(99), "spectacles")
ann = face.annotation
spec = patch_schedule("rectangular", ann.face.rect.w)[0]
print("face", ann.face.rect.as_tuple(), "patch", spec.label)

for method in ("grayscale", "haar"):
    templates = {f: load_template(os.path.join(work, "templates", f"{method}_{f}.tmpl"))
                 for f in ("left_eye", "right_eye", "mouth")}
    for hier in (False, True):
        t0 = time.perf_counter()
        res = detect(face.rgb, ann.face, method, spec, templates,
                     DetectOptions(hierarchical=hier))
        dt = time.perf_counter() - t0
        print(f"\n{method} {'pyramid' if hier else 'exhaustive'} ({dt * 1000:.0f} ms)")
        for feat, r in res.items():
            hit = judge(r.patch, ann.gt_rect(feat))
            print(f"  {feat:9s} {r.patch.as_tuple()} score {r.score:.3f} "
                  f"{'hit' if hit else 'miss'}")
