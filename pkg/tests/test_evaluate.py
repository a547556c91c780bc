import dataclasses
import os

import pytest
from hypothesis import given, strategies as st

from eyemouth.evaluate import (AnnotationError, SweepConfig, accuracy, class_average, judge,
                               load_annotations, parse_annotation_line, run_sweep)
from eyemouth.facemodel import FEATURES
from eyemouth.imgio import Rect
from eyemouth.template import METHODS, load_template


def test_judge_containment():
    assert judge(Rect(10, 10, 40, 32), Rect(15, 15, 20, 20), 0.0)


def test_judge_small_overhang_passes():
    # 40 px wide patch, 10 % allows 4 px; gt pokes out by 3
    assert judge(Rect(10, 10, 40, 40), Rect(7, 20, 20, 10), 0.10)


def test_judge_large_overhang_fails():
    assert not judge(Rect(10, 10, 40, 40), Rect(0, 20, 20, 10), 0.10)


def test_judge_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        judge(Rect(0, 0, 4, 4), Rect(0, 0, 4, 4), 1.0)


rects = st.builds(Rect, st.integers(0, 50), st.integers(0, 50), st.integers(1, 40),
                  st.integers(1, 40))


@given(rects, rects, st.floats(0, 0.5), st.floats(0, 0.49))
def test_judge_monotone_in_tolerance(det, gt, t, dt):
    if judge(det, gt, t):
        assert judge(det, gt, min(t + dt, 0.99))


@pytest.mark.parametrize("p, n, acc", [(3, 4, 75.0), (0, 7, 0.0), (119, 119, 100.0)])
def test_accuracy(p, n, acc):
    assert accuracy(p, n) == acc


def test_accuracy_needs_total():
    with pytest.raises(ValueError):
        accuracy(0, 0)


@given(st.integers(1, 500), st.integers(0, 500), st.integers(1, 10))
def test_accuracy_scale_exact(n, p, k):
    p = min(p, n)
    assert accuracy(k * p, k * n) == pytest.approx(accuracy(p, n), abs=1e-12)


def test_class_average():
    assert class_average(94.95, 75.60, 92.68) == pytest.approx(87.74, abs=0.1)
    assert class_average(100, 100, 100) == 100
    assert class_average(0, 0, 0) == 0


LINE = "a.ppm 10 20 110 20 110 150 10 150 70 50 30 24 20 50 30 24 40 110 40 32 normal"


def test_parse_annotation_line():
    ann = parse_annotation_line(LINE, base_dir="/data")
    assert ann.image_path == os.path.join("/data", "a.ppm")
    assert ann.face.rect == Rect(10, 20, 100, 130)
    assert ann.gt_rect("left_eye") == Rect(70, 50, 30, 24)
    assert ann.gt_rect("right_eye") == Rect(20, 50, 30, 24)
    assert ann.gt_rect("mouth") == Rect(40, 110, 40, 32)
    assert ann.klass == "normal"
    assert parse_annotation_line("   # only a comment") is None


@pytest.mark.parametrize("line, msg", [
    (LINE.rsplit(" ", 1)[0], "expected 22 fields"),
    (LINE.replace("normal", "bearded"), "unknown class"),
    (LINE.replace(" 70 50 ", " 70 xx "), "bad number"),
])
def test_parse_errors(line, msg):
    with pytest.raises(AnnotationError, match=msg):
        parse_annotation_line(line)


def test_load_annotations_reports_line_number(tmp_path):
    p = tmp_path / "ann.txt"
    good = [LINE] * 6
    p.write_text("\n".join(good + ["a.ppm 1 2 3"]) + "\n")
    with pytest.raises(AnnotationError) as exc:
        load_annotations(p)
    assert exc.value.lineno == 7
    assert ":7:" in str(exc.value)


def _templates(corpus_dir):
    return {m: {f: load_template(os.path.join(corpus_dir, "templates", f"{m}_{f}.tmpl"))
                for f in FEATURES} for m in METHODS}


@pytest.fixture(scope="module")
def corpus(corpus_dir):
    return load_annotations(os.path.join(corpus_dir, "annotations.txt"))


def test_sweep_step0_is_perfect(corpus, corpus_dir):
    rep = run_sweep(corpus, METHODS, ["rectangular"], _templates(corpus_dir), steps=[0])
    assert len(rep.rows) == 6
    for r in rep.rows:
        assert sum(r.totals.values()) == 20
        assert r.passes == r.totals
        assert r.average == 100.0


def test_sweep_displaced_ground_truth(corpus, corpus_dir):
    moved = [dataclasses.replace(a, gt={f: Rect(0, 0, 8, 8) for f in FEATURES})
             if i < 10 else a for i, a in enumerate(corpus)]
    rep = run_sweep(moved, ["grayscale"], ["rectangular"], _templates(corpus_dir), steps=[0])
    for r in rep.rows:
        assert sum(r.passes.values()) * 2 == sum(r.totals.values()) == 20


def test_sweep_empty_method_list(corpus, corpus_dir):
    rep = run_sweep(corpus, [], ["rectangular"], _templates(corpus_dir))
    assert rep.rows == []
    assert rep.to_tsv().count("\n") == 2


def test_sweep_skips_unreadable_images(corpus, corpus_dir):
    broken = [dataclasses.replace(corpus[0], image_path="/nonexistent/x.ppm")] + corpus[1:4]
    rep = run_sweep(broken, ["haar"], ["square"], _templates(corpus_dir), steps=[0])
    assert len(rep.warnings) == 1
    assert all(sum(r.totals.values()) == 3 for r in rep.rows)
    assert "# skipped: /nonexistent/x.ppm" in rep.to_tsv()


def test_sweep_report_reproducible_across_workers(corpus, corpus_dir):
    t = _templates(corpus_dir)
    a = run_sweep(corpus[:6], METHODS, ["square"], t, SweepConfig(workers=1), steps=[1])
    b = run_sweep(corpus[:6], METHODS, ["square"], t, SweepConfig(workers=3), steps=[1])
    assert a.to_tsv() == b.to_tsv()


def test_report_layout(corpus, corpus_dir):
    rep = run_sweep(corpus[:3], ["grayscale"], ["rectangular"], _templates(corpus_dir),
                    steps=[0])
    lines = rep.to_tsv().splitlines()
    assert lines[0].startswith("# tolerance=0.10\t")
    assert lines[1].split("\t")[:4] == ["method", "shape", "step", "feature"]
    first = lines[2].split("\t")
    assert first[:4] == ["grayscale", "rectangular", "0", "left_eye"]
    assert first[-1] == "normal,long_hair,spectacles"
    assert lines[4].split("\t")[-1] == "normal"
