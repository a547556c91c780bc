"""
Accuracy against patch size
===========================

Generates a corpus and sweeps the rectangular and square patch schedules.
Shrinking the patch below the feature size costs accuracy.
"""

import os
import tempfile

from eyemouth import generate_corpus, load_annotations, load_template, run_sweep
from eyemouth.evaluate import SweepConfig

work = tempfile.mkdtemp()
generate_corpus(15, 2, work)

corpus = load_annotations(os.path.join(work, "annotations.txt"))
templates = {m: {f: load_template(os.path.join(work, "templates", f"{m}_{f}.tmpl"))
                 for f in ("left_eye", "right_eye", "mouth")}
             for m in ("grayscale", "haar")}

report = run_sweep(corpus, ["grayscale", "haar"], ["rectangular", "square"], templates,
                   SweepConfig(workers=os.cpu_count() or 1))

# average accuracy over the three image classes, one line per cell
for row in report.rows:
    print(f"{row.method:9s} {row.shape:11s} step {row.step} {row.feature:9s} "
          f"{row.average:6.1f}%")

# the full report is tab-separated, with the settings in a comment header
print(report.to_tsv().splitlines()[0])
