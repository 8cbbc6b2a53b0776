#!/usr/bin/python3

import csv
import json

import pytest

from boostrec.bench import ComboResult, EvalReport, PrcPoint, write_report
from boostrec.bench.report import RESULT_COLUMNS, host_info, percent_change
from boostrec.pipeline import STAGES


def combo(detector, descriptor, pipeline, keypoints, seconds, area):
    times = dict.fromkeys(STAGES, 0.0)
    times["detect"] = seconds / 2
    times["describe"] = seconds / 2
    return ComboResult(
        detector, descriptor, pipeline, 4, keypoints, 1000.0, times, [PrcPoint(3, 1.0, area)], area
    )


@pytest.fixture
def report():
    return EvalReport(
        results=[
            combo("iss", "shot", "LP", 200.0, 2.0, 0.5),
            combo("iss", "shot", "Boost", 100.0, 1.0, 0.6),
            combo("us:0.02", "shot", "LP", 400.0, 4.0, 0.8),
            combo("us:0.02", "shot", "Boost", 300.0, 2.0, 0.4),
            combo("iss", "fpfh", "LP", 200.0, 1.0, 0.5),
        ],
        host={"platform": "test"},
    )


def test_percent_change():
    assert percent_change(200, 100) == -50.0
    assert percent_change(0.5, 0.6) == pytest.approx(20.0)
    assert percent_change(0, 1) is None
    assert percent_change(None, 1) is None
    assert percent_change(1, None) is None


def test_combo_shares():
    result = combo("iss", "shot", "LP", 10.0, 2.0, 0.5)
    assert result.total_time == 2.0
    shares = result.shares()
    assert shares["detect"] == shares["describe"] == 0.5
    assert shares["match"] == 0.0
    assert combo("iss", "shot", "LP", 10.0, 0.0, 0.5).shares()["detect"] == 0.0


def test_lookup(report):
    assert len(report) == 5
    assert report.get("iss", "shot", "Boost").keypoints == 100.0
    assert report.get("fast", "shot", "LP") is None
    assert report.pairs() == [("iss", "shot"), ("us:0.02", "shot"), ("iss", "fpfh")]


def test_comparison_rows(report):
    rows = report.comparison_rows()
    assert [(r["detector"], r["descriptor"]) for r in rows] == [
        ("iss", "shot"),
        ("us:0.02", "shot"),
        ("iss", "fpfh"),
        ("Average", "shot"),
        ("Average", "fpfh"),
    ]
    iss = rows[0]
    assert (iss["keypoints_lp"], iss["keypoints_boost"]) == (200.0, 100.0)
    assert iss["keypoints_pct"] == -50.0
    assert iss["time_pct"] == -50.0
    assert iss["auc_pct"] == pytest.approx(20.0)

    average = rows[3]
    assert average["keypoints_pct"] == pytest.approx((-50.0 - 25.0) / 2)
    assert average["time_pct"] == pytest.approx(-50.0)
    assert average["auc_pct"] == pytest.approx((20.0 - 50.0) / 2)

    # no boosted run for fpfh
    assert rows[2]["keypoints_boost"] is None
    assert rows[2]["keypoints_pct"] is None
    assert rows[4]["auc_pct"] is None


def test_write_report(report, tmp_path):
    paths = write_report(report, tmp_path.joinpath("out"))
    assert sorted(paths) == ["json", "pareto", "results", "stages"]

    with paths["results"].open() as fp:
        results = list(csv.DictReader(fp))
    assert list(results[0]) == list(RESULT_COLUMNS)
    assert len(results) == 5
    assert results[0]["keypoints_pct"] == "-50"
    assert results[2]["auc_pct"] == ""

    with paths["stages"].open() as fp:
        stages = list(csv.DictReader(fp))
    assert len(stages) == 5
    assert stages[0]["pipeline"] == "LP"
    assert float(stages[0]["total"]) == 2.0
    assert float(stages[0]["share_detect"]) == 0.5

    with paths["pareto"].open() as fp:
        pareto = list(csv.DictReader(fp))
    assert [(r["detector"], r["pipeline"], r["auc"]) for r in pareto[:2]] == [
        ("iss", "LP", "0.5"),
        ("iss", "Boost", "0.6"),
    ]

    data = json.loads(paths["json"].read_text())
    assert data["host"] == {"platform": "test"}
    assert data["iou_min"] == 0.25
    assert data["results"][1]["prc"] == [{"threshold": 3, "precision": 1.0, "recall": 0.6}]
    assert len(data["comparison"]) == 5


def test_host_info():
    info = host_info()
    assert info["cpu_logical"] >= 1
    assert info["memory_gb"] > 0
    assert info["python"].count(".") == 2
