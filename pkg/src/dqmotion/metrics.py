"""Evaluation metrics between motion sequences.

Three metrics, all computed on root-centered joint positions obtained by
forward kinematics with the root displacement zeroed (pose quality only,
by construction invariant to root translation):

- frame-wise Euclidean distance, averaged over frames and joints;
- normalized power-spectrum similarity (NPSS): per feature, the squared
  magnitude of the temporal DFT is normalized to unit mass and the 1-D
  earth-mover distance between the two cumulative spectra is averaged
  across features, weighted by the truth's per-feature total power;
- mean acceleration magnitude (second finite difference per frame step),
  a jitter proxy, reported for both sequences plus their gap.

Trajectory-level entry points (`euclidean_between`, `npss_between`,
`acceleration_of`) operate on plain position arrays; the `metric_*`
wrappers run forward kinematics on pose sequences first.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError, ShapeMismatchError, TooFewFramesError
from .kinematics import LocalPose, matrix_fk


@dataclass
class MetricReport:
    euclidean: float
    npss: float
    acceleration_pred: float
    acceleration_truth: float
    acceleration_error: float
    frame_time: float | None = None

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "euclidean": self.euclidean,
            "npss": self.npss,
            "acceleration_pred": self.acceleration_pred,
            "acceleration_truth": self.acceleration_truth,
            "acceleration_error": self.acceleration_error,
            "frame_time": self.frame_time,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# trajectory level
# ---------------------------------------------------------------------------

def euclidean_between(pred: np.ndarray, truth: np.ndarray) -> float:
    """Mean over frames and joints of the positional distance.

    Inputs are (F, J, 3) position arrays.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ShapeMismatchError("position arrays differ in shape")
    if pred.ndim != 3 or pred.shape[0] < 1:
        raise ShapeMismatchError("expected (F >= 1, J, 3) position arrays")
    return float(np.mean(np.linalg.norm(pred - truth, axis=-1)))


def npss_between(pred: np.ndarray, truth: np.ndarray) -> float:
    """Power-weighted earth-mover distance between normalized temporal
    power spectra, over flattened feature columns.

    Inputs are (F, ...) arrays with time first; trailing axes are
    flattened into features. Features with zero power in both sequences
    carry no weight; two identical sequences score exactly 0.
    """
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise LengthMismatchError("sequences differ in shape")
    if pred.shape[0] < 2:
        raise TooFewFramesError("NPSS needs at least 2 frames")
    pred = pred.reshape(pred.shape[0], -1)
    truth = truth.reshape(truth.shape[0], -1)

    pred_power = np.abs(np.fft.fft(pred, axis=0)) ** 2
    truth_power = np.abs(np.fft.fft(truth, axis=0)) ** 2
    pred_total = pred_power.sum(axis=0)
    truth_total = truth_power.sum(axis=0)

    with np.errstate(invalid="ignore", divide="ignore"):
        pred_norm = np.where(pred_total > 0, pred_power / pred_total, 0.0)
        truth_norm = np.where(truth_total > 0, truth_power / truth_total, 0.0)

    # 1-D EMD between unit-mass spectra: L1 distance of the cumulative sums.
    emd = np.abs(np.cumsum(pred_norm, axis=0) - np.cumsum(truth_norm, axis=0)).sum(axis=0)

    weight_total = truth_total.sum()
    if weight_total <= 0.0:
        return 0.0
    return float((emd * truth_total).sum() / weight_total)


def acceleration_of(positions: np.ndarray) -> float:
    """Mean second-difference magnitude per frame step.

    Input is (F, J, 3) with F >= 3; frame time is deliberately not folded
    in, so the value is in length units per squared frame step.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 3:
        raise ShapeMismatchError("expected a (F, J, 3) position array")
    if positions.shape[0] < 3:
        raise TooFewFramesError("acceleration needs at least 3 frames")
    second = positions[2:] - 2.0 * positions[1:-1] + positions[:-2]
    return float(np.mean(np.linalg.norm(second, axis=-1)))


# ---------------------------------------------------------------------------
# pose level
# ---------------------------------------------------------------------------

def pose_positions(poses: list[LocalPose]) -> np.ndarray:
    """(F, J, 3) root-centered joint positions; root displacement ignored."""
    if not poses:
        raise TooFewFramesError("need at least one pose")
    return np.stack([matrix_fk(pose)[1] for pose in poses])


def _check_pose_pair(pred: list[LocalPose], truth: list[LocalPose]):
    if len(pred) != len(truth):
        raise LengthMismatchError(f"sequence lengths differ: {len(pred)} vs {len(truth)}")
    if not pred:
        raise LengthMismatchError("empty sequences")
    if pred[0].skeleton is not truth[0].skeleton and pred[0].skeleton != truth[0].skeleton:
        raise ShapeMismatchError("sequences use different skeletons")


def metric_euclidean(pred: list[LocalPose], truth: list[LocalPose]) -> float:
    _check_pose_pair(pred, truth)
    return euclidean_between(pose_positions(pred), pose_positions(truth))


def metric_npss(pred: list[LocalPose], truth: list[LocalPose]) -> float:
    _check_pose_pair(pred, truth)
    if len(pred) < 2:
        raise TooFewFramesError("NPSS needs at least 2 frames")
    return npss_between(pose_positions(pred), pose_positions(truth))


def metric_acceleration(seq: list[LocalPose]) -> float:
    if len(seq) < 3:
        raise TooFewFramesError("acceleration needs at least 3 frames")
    return acceleration_of(pose_positions(seq))


def metric_report(
    pred: list[LocalPose], truth: list[LocalPose], frame_time: float | None = None
) -> MetricReport:
    """All metrics bundled; acceleration gap is the absolute difference."""
    _check_pose_pair(pred, truth)
    pred_pos = pose_positions(pred)
    truth_pos = pose_positions(truth)
    accel_pred = acceleration_of(pred_pos)
    accel_truth = acceleration_of(truth_pos)
    return MetricReport(
        euclidean=euclidean_between(pred_pos, truth_pos),
        npss=npss_between(pred_pos, truth_pos),
        acceleration_pred=accel_pred,
        acceleration_truth=accel_truth,
        acceleration_error=abs(accel_pred - accel_truth),
        frame_time=frame_time,
    )
