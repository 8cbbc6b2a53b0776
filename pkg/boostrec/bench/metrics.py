#!/usr/bin/python3

from typing import Callable, Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from boostrec.cloud.datatypes import Aabb, PointCloud, RigidTransform, bounding_box, transform_cloud
from boostrec.exceptions import DegenerateBoxError, ModelIdMismatch
from boostrec.recognition.datatypes import Detection

TP = "TP"
FP = "FP"
FN = "FN"


class GroundTruthEntry(NamedTuple):
    """Annotated pose (model frame to scene frame) of one model instance in a scene."""

    scene_id: str
    model_id: str
    pose: RigidTransform


class PrcPoint(NamedTuple):
    threshold: int
    precision: float
    recall: float


class Classification(NamedTuple):
    """Counts for one scene and the label given to each detection, in input order."""

    tp: int
    fp: int
    fn: int
    labels: List[str]


def posed_box(model: PointCloud, pose: RigidTransform) -> Aabb:
    """Axis-aligned box, in the scene frame, of a model cloud placed with ``pose``."""
    box = bounding_box(transform_cloud(model, pose))
    if box.volume <= 0:
        raise DegenerateBoxError("Bounding box of the posed model has zero volume")
    return box


def box_iou(first: Aabb, second: Aabb) -> float:
    """Intersection over union (Jaccard index) of two boxes."""
    inter = first.intersection_volume(second)
    union = first.volume + second.volume - inter
    if union <= 0:
        raise DegenerateBoxError("Boxes have zero volume")
    return float(inter / union)


def detection_iou(det: Detection, gt: GroundTruthEntry, model: PointCloud) -> float:
    """
    Overlap of a detection with a ground truth entry: IoU of the axis-aligned
    boxes of the model cloud placed with the estimated and the annotated pose.
    """
    if det.model_id != gt.model_id:
        raise ModelIdMismatch(
            f"Detection of '{det.model_id}' compared with ground truth of '{gt.model_id}'"
        )
    return box_iou(posed_box(model, det.pose), posed_box(model, gt.pose))


def _classify(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruthEntry],
    iou: Callable[[int, int], float],
    iou_min: float,
) -> Classification:
    consumed = np.zeros(len(ground_truth), dtype=bool)
    labels = [""] * len(detections)
    tp = fp = fn = 0
    # strongest first, so a detection's label never depends on weaker ones
    order = sorted(range(len(detections)), key=lambda i: -detections[i].support)
    for i in order:
        det = detections[i]
        candidates = [
            j
            for j, entry in enumerate(ground_truth)
            if entry.model_id == det.model_id and not consumed[j]
        ]
        if not candidates:
            labels[i] = FP
            fp += 1
            continue
        overlaps = [iou(i, j) for j in candidates]
        best = int(np.argmax(overlaps))
        consumed[candidates[best]] = True
        if overlaps[best] >= iou_min:
            labels[i] = TP
            tp += 1
        else:
            labels[i] = FN
            fn += 1
    fn += int((~consumed).sum())
    return Classification(tp, fp, fn, labels)


def classify(
    detections: Sequence[Detection],
    ground_truth: Sequence[GroundTruthEntry],
    models: Dict[str, PointCloud],
    iou_min: float = 0.25,
) -> Classification:
    """
    Labels the detections of one scene.

    Detections are matched in order of decreasing support (ties keep their
    input order); labels are reported in input order. A detection of a model
    present in the scene consumes its best overlapping unconsumed ground truth
    entry and is a TP when that overlap reaches ``iou_min``, otherwise it counts
    once as a FN. A detection of an absent (or already consumed) model is a FP.
    Every entry left unconsumed is a FN.
    """

    def iou(i: int, j: int) -> float:
        det = detections[i]
        return detection_iou(det, ground_truth[j], models[det.model_id])

    return _classify(detections, ground_truth, iou, iou_min)


def precision_recall(tp: int, fp: int, fn: int) -> Tuple[float, float]:
    """Precision and recall, each 1.0 when its denominator is zero."""
    if min(tp, fp, fn) < 0:
        raise ValueError("Counts must be non-negative")
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall


def prc_sweep(
    scenes: Sequence[Tuple[Sequence[Detection], Sequence[GroundTruthEntry]]],
    models: Dict[str, PointCloud],
    iou_min: float = 0.25,
    start: int = 3,
) -> List[PrcPoint]:
    """
    Precision-recall points for a rising threshold on the detection support.

    ``scenes`` holds the detections and ground truth of every scene. Starting at
    ``start``, each threshold keeps the detections whose support reaches it,
    classifies them and aggregates the counts over all scenes. The sweep ends
    after the last threshold any detection survives; the first threshold is
    always reported.
    """
    overlaps = []
    for detections, ground_truth in scenes:
        table = {}
        for i, det in enumerate(detections):
            for j, entry in enumerate(ground_truth):
                if entry.model_id == det.model_id:
                    table[(i, j)] = detection_iou(det, entry, models[det.model_id])
        overlaps.append(table)

    points = []
    threshold = start
    while True:
        tp = fp = fn = 0
        for (detections, ground_truth), table in zip(scenes, overlaps):
            kept = [i for i, det in enumerate(detections) if det.support >= threshold]
            result = _classify(
                [detections[i] for i in kept],
                ground_truth,
                lambda i, j: table[(kept[i], j)],
                iou_min,
            )
            tp, fp, fn = tp + result.tp, fp + result.fp, fn + result.fn
        precision, recall = precision_recall(tp, fp, fn)
        points.append(PrcPoint(threshold, precision, recall))
        threshold += 1
        if not any(det.support >= threshold for detections, _ in scenes for det in detections):
            return points


def auc(points: Sequence[PrcPoint]) -> float:
    """
    Area under a precision-recall curve.

    Points are sorted by recall, equal recalls keep their highest precision and
    the curve is extended left to recall 0 at the precision of its lowest recall
    point before trapezoidal integration.
    """
    if not len(points):
        raise ValueError("Cannot integrate an empty precision-recall curve")
    best: Dict[float, float] = {}
    for point in points:
        best[point.recall] = max(point.precision, best.get(point.recall, 0.0))
    recall = np.array(sorted(best))
    precision = np.array([best[i] for i in recall])
    if recall[0] > 0:
        recall = np.concatenate([[0.0], recall])
        precision = np.concatenate([[precision[0]], precision])
    return float(trapezoid(precision, recall))
