"""Training losses between encoded clips, with closed-form gradients.

Five losses compare a predicted clip against ground truth (or, for the
offset and regularization terms, against the skeleton / the unit
conditions alone). Reduction convention, applied uniformly: mean over
joint blocks, then mean over frames; the MSE additionally averages over
the block components. The three root-translation columns never enter a
loss; the root displacement is modeled as a separate signal.

Each loss has an analytic gradient with respect to the predicted feature
matrix, verified against central finite differences by `grad_check`.
"""

from dataclasses import dataclass, field

import numpy as np

from . import dualquat, quat
from .bvh import Skeleton
from .encoding import EncodedClip, ReprKind
from .errors import DegenerateNormError, ShapeMismatchError

_ROTATIONAL_KINDS = (ReprKind.DUALQUAT, ReprKind.QUATERNIONS, ReprKind.QUATERNIONS_POSITIONS)

GRAD_EPS_LADDER = (1e-4, 1e-5, 1e-6)
GRAD_LOSSES = (
    "mse",
    "rotational_local",
    "rotational_current",
    "positional",
    "offset",
    "regularization",
)


@dataclass
class LossWeights:
    """Aggregation weights; defaults follow the reference configuration
    (rotational and positional at 1/3, regularizer at 0.01)."""

    mse: float = 1.0
    rotational: float = 1.0 / 3.0
    positional: float = 1.0 / 3.0
    offset: float = 1.0
    regularization: float = 0.01

    def __post_init__(self):
        for name in ("mse", "rotational", "positional", "offset", "regularization"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"weight {name} must be finite and non-negative")

    _ALIASES = {
        "mse": "mse",
        "quat": "rotational",
        "rotational": "rotational",
        "pos": "positional",
        "positional": "positional",
        "offset": "offset",
        "reg": "regularization",
        "regularization": "regularization",
    }

    @classmethod
    def from_mapping(cls, mapping) -> "LossWeights":
        """Build weights from e.g. {"reg": 0.01, "pos": 0.5}; unknown keys raise."""
        kwargs = {}
        for key, value in mapping.items():
            if key not in cls._ALIASES:
                raise ValueError(f"unknown loss weight {key!r}")
            kwargs[cls._ALIASES[key]] = float(value)
        return cls(**kwargs)


@dataclass
class LossReport:
    """All loss components of one comparison; inapplicable ones are None."""

    kind: str
    rotation_space: str
    standardized_inputs: bool
    weights: LossWeights
    mse: float | None = None
    rotational: float | None = None
    rotational_raw: float | None = None
    positional: float | None = None
    offset: float | None = None
    regularization: float | None = None
    weighted_total: float = 0.0
    per_joint: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "kind": self.kind,
            "rotation_space": self.rotation_space,
            "standardized_inputs": self.standardized_inputs,
            "weights": {
                "mse": self.weights.mse,
                "rotational": self.weights.rotational,
                "positional": self.weights.positional,
                "offset": self.weights.offset,
                "regularization": self.weights.regularization,
            },
            "mse": self.mse,
            "rotational": self.rotational,
            "rotational_raw": self.rotational_raw,
            "positional": self.positional,
            "offset": self.offset,
            "regularization": self.regularization,
            "weighted_total": self.weighted_total,
            "per_joint": {k: list(v) for k, v in self.per_joint.items()},
        }

    def to_json(self) -> str:
        import json

        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = []
        for name in ("mse", "rotational", "rotational_raw", "positional", "offset", "regularization"):
            value = getattr(self, name)
            lines.append(f"{name} = {'n/a' if value is None else format(value, '.12g')}")
        lines.append(f"weighted_total = {self.weighted_total:.12g}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------

def _check_pair(pred: EncodedClip, truth: EncodedClip):
    if pred.kind is not truth.kind:
        raise ShapeMismatchError(f"kind mismatch: {pred.kind.value} vs {truth.kind.value}")
    if pred.width != truth.width or pred.num_frames != truth.num_frames:
        raise ShapeMismatchError("feature shapes differ")


def _require_raw(*clips: EncodedClip):
    for clip in clips:
        if clip.standardized:
            raise ValueError("loss needs raw features; destandardize the clip first")


def _encoded_parents(skeleton: Skeleton) -> np.ndarray:
    """Parent row per encoded joint, -1 for the root. Parents of encoded
    joints are never end sites, so the mapping is closed."""
    row_of = {joint: row for row, joint in enumerate(skeleton.encoded_indices)}
    out = np.empty(len(row_of), dtype=int)
    for row, joint in enumerate(skeleton.encoded_indices):
        parent = skeleton.joints[joint].parent
        out[row] = -1 if parent is None else row_of[parent]
    return out


def _normalized_quats(blocks: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(blocks, axis=-1)
    if np.any(norms <= 1e-12):
        raise DegenerateNormError("quaternion block with vanishing norm")
    return blocks / norms[..., None]


def _rotation_quats(clip: EncodedClip, space: str) -> np.ndarray:
    """(F, J, 4) rotations in the requested space for a rotational kind."""
    if clip.kind not in _ROTATIONAL_KINDS:
        raise ShapeMismatchError(f"rotational loss undefined for kind {clip.kind.value}")
    parents = _encoded_parents(clip.skeleton)
    blocks = clip.joint_blocks()
    if clip.kind is ReprKind.DUALQUAT:
        current = _normalized_quats(blocks[..., :4])
        if space == "current":
            return current
        local = np.empty_like(current)
        for row in range(current.shape[1]):
            parent = parents[row]
            if parent < 0:
                local[:, row] = current[:, row]
            else:
                local[:, row] = quat.mul(quat.conjugate(current[:, parent]), current[:, row])
        return local
    # quaternion-valued blocks hold local rotations
    local = _normalized_quats(blocks[..., :4])
    if space == "local":
        return local
    current = np.empty_like(local)
    for row in range(local.shape[1]):
        parent = parents[row]
        if parent < 0:
            current[:, row] = local[:, row]
        else:
            current[:, row] = quat.mul(current[:, parent], local[:, row])
    return current


def _positions(clip: EncodedClip) -> np.ndarray:
    """(F, J, 3) per-joint positions read off the representation."""
    from .errors import NoPositionsError

    blocks = clip.joint_blocks()
    if clip.kind is ReprKind.POSITIONS:
        return blocks
    if clip.kind is ReprKind.QUATERNIONS_POSITIONS:
        return blocks[..., 4:7]
    if clip.kind is ReprKind.ORTHO6D_POSITIONS:
        return blocks[..., 6:9]
    if clip.kind is ReprKind.DUALQUAT:
        return dualquat.translation(dualquat.normalize(blocks))
    raise NoPositionsError(f"kind {clip.kind.value} carries no positions")


def _extracted_offsets(clip: EncodedClip) -> np.ndarray:
    """(F, J, 3) offsets encoded in the blocks (root row is the zero
    translation of its pure rotation)."""
    if clip.kind is not ReprKind.DUALQUAT:
        raise ShapeMismatchError("offset loss is defined for the dualquat kind")
    parents = _encoded_parents(clip.skeleton)
    current = dualquat.normalize(clip.joint_blocks())
    local = np.empty_like(current)
    for row in range(current.shape[1]):
        parent = parents[row]
        if parent < 0:
            local[:, row] = current[:, row]
        else:
            local[:, row] = dualquat.mul(
                dualquat.conjugate(current[:, parent]), current[:, row]
            )
    return dualquat.translation(local)


def _skeleton_offsets(clip: EncodedClip, skeleton: Skeleton) -> np.ndarray:
    return skeleton.offsets[list(skeleton.encoded_indices)]


# ---------------------------------------------------------------------------
# the losses
# ---------------------------------------------------------------------------

def loss_mse(pred: EncodedClip, truth: EncodedClip) -> float:
    """Mean squared error over the per-joint blocks."""
    _check_pair(pred, truth)
    diff = pred.joint_blocks() - truth.joint_blocks()
    return float(np.mean(diff * diff))


def _rotational_terms(pred: EncodedClip, truth: EncodedClip, space: str):
    q_pred = _rotation_quats(pred, space)
    q_truth = _rotation_quats(truth, space)
    dots = np.sum(q_pred * q_truth, axis=-1)
    raw = 1.0 - dots
    aligned = 1.0 - np.abs(dots)
    return aligned, raw, dots


def loss_rotational(pred: EncodedClip, truth: EncodedClip, space: str = "local") -> float:
    """1 - <q, q~> on unit rotations, sign-aligned; mean over joints/frames.

    `space` selects local (parent-relative, recovered through the
    hierarchy for the dualquat kind) or current (root-relative) rotations.
    """
    if space not in ("local", "current"):
        raise ValueError(f"space must be 'local' or 'current', got {space!r}")
    _check_pair(pred, truth)
    _require_raw(pred, truth)
    aligned, _, _ = _rotational_terms(pred, truth, space)
    return float(np.mean(aligned))


def loss_rotational_raw(pred: EncodedClip, truth: EncodedClip, space: str = "local") -> float:
    """Same but without sign alignment; ranges over [0, 2] per joint."""
    _check_pair(pred, truth)
    _require_raw(pred, truth)
    _, raw, _ = _rotational_terms(pred, truth, space)
    return float(np.mean(raw))


def loss_positional(pred: EncodedClip, truth: EncodedClip) -> float:
    """Mean Euclidean distance between represented joint positions."""
    _check_pair(pred, truth)
    _require_raw(pred, truth)
    delta = _positions(pred) - _positions(truth)
    return float(np.mean(np.linalg.norm(delta, axis=-1)))


def loss_offset(pred: EncodedClip, truth_skeleton: Skeleton | None = None) -> float:
    """Mean violation of the skeleton's bone offsets, non-root joints."""
    _require_raw(pred)
    skeleton = truth_skeleton if truth_skeleton is not None else pred.skeleton
    extracted = _extracted_offsets(pred)[:, 1:, :]
    expected = _skeleton_offsets(pred, skeleton)[1:]
    return float(np.mean(np.linalg.norm(extracted - expected, axis=-1)))


def loss_regularization(pred: EncodedClip) -> float:
    """Squared unit-condition residuals of the raw blocks.

    Computed on the blocks as stored, prior to any normalization: the
    term exists precisely to penalize drift off the unit manifold.
    """
    if pred.kind is not ReprKind.DUALQUAT:
        raise ShapeMismatchError("regularization loss is defined for the dualquat kind")
    _require_raw(pred)
    norm_res, ortho_res = dualquat.unitary_residual(pred.joint_blocks())
    return float(np.mean(norm_res**2 + ortho_res**2))


def _applicable(kind: ReprKind) -> set:
    names = {"mse"}
    if kind in _ROTATIONAL_KINDS:
        names.add("rotational")
    if kind.has_positions:
        names.add("positional")
    if kind is ReprKind.DUALQUAT:
        names.update(("offset", "regularization"))
    return names


def loss_total(
    pred: EncodedClip,
    truth: EncodedClip,
    weights: LossWeights | None = None,
    rotation_space: str = "local",
    truth_skeleton: Skeleton | None = None,
) -> LossReport:
    """Weighted sum of every component applicable to the clips' kind."""
    _check_pair(pred, truth)
    weights = weights or LossWeights()
    report = LossReport(
        kind=pred.kind.value,
        rotation_space=rotation_space,
        standardized_inputs=pred.standardized or truth.standardized,
        weights=weights,
    )
    names = _applicable(pred.kind)
    if report.standardized_inputs and names != {"mse"}:
        raise ValueError("loss_total needs raw clips; destandardize first")

    diff = pred.joint_blocks() - truth.joint_blocks()
    report.mse = float(np.mean(diff * diff))
    report.per_joint["mse"] = np.mean(diff * diff, axis=(0, 2)).tolist()
    total = weights.mse * report.mse

    if "rotational" in names:
        aligned, raw, _ = _rotational_terms(pred, truth, rotation_space)
        report.rotational = float(np.mean(aligned))
        report.rotational_raw = float(np.mean(raw))
        report.per_joint["rotational"] = np.mean(aligned, axis=0).tolist()
        total += weights.rotational * report.rotational
    if "positional" in names:
        dist = np.linalg.norm(_positions(pred) - _positions(truth), axis=-1)
        report.positional = float(np.mean(dist))
        report.per_joint["positional"] = np.mean(dist, axis=0).tolist()
        total += weights.positional * report.positional
    if "offset" in names:
        skeleton = truth_skeleton if truth_skeleton is not None else truth.skeleton
        violation = np.linalg.norm(
            _extracted_offsets(pred)[:, 1:, :] - _skeleton_offsets(pred, skeleton)[1:],
            axis=-1,
        )
        report.offset = float(np.mean(violation))
        report.per_joint["offset"] = np.mean(violation, axis=0).tolist()
        total += weights.offset * report.offset
    if "regularization" in names:
        norm_res, ortho_res = dualquat.unitary_residual(pred.joint_blocks())
        per = norm_res**2 + ortho_res**2
        report.regularization = float(np.mean(per))
        report.per_joint["regularization"] = np.mean(per, axis=0).tolist()
        total += weights.regularization * report.regularization

    report.weighted_total = float(total)
    return report


# ---------------------------------------------------------------------------
# analytic gradients
# ---------------------------------------------------------------------------

def _left_matrix(q: np.ndarray) -> np.ndarray:
    """L(q) with q x = L(q) @ x."""
    w, x, y, z = q
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


def _right_matrix(q: np.ndarray) -> np.ndarray:
    """R(q) with x q = R(q) @ x."""
    w, x, y, z = q
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, z, -y],
            [y, -z, w, x],
            [z, y, -x, w],
        ]
    )


_CONJ4 = np.diag([1.0, -1.0, -1.0, -1.0])


def _normalize_jacobian(r: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(r)
    r_hat = r / n
    return (np.eye(4) - np.outer(r_hat, r_hat)) / n


def _dq_normalize_jacobian(d: np.ndarray) -> np.ndarray:
    """8x8 Jacobian of dualquat.normalize at d."""
    r, e = d[:4], d[4:]
    n = np.linalg.norm(r)
    k = r @ e
    n3 = n**3
    n5 = n**5
    jac = np.zeros((8, 8))
    r_hat = r / n
    jac[:4, :4] = (np.eye(4) - np.outer(r_hat, r_hat)) / n
    jac[4:, 4:] = np.eye(4) / n - np.outer(r, r) / n3
    jac[4:, :4] = (
        -np.outer(e, r) / n3
        - k * np.eye(4) / n3
        - np.outer(r, e) / n3
        + 3.0 * k * np.outer(r, r) / n5
    )
    return jac


def _dq_left_matrix(a: np.ndarray) -> np.ndarray:
    """Matrix of x -> a x (dual-quaternion product)."""
    out = np.zeros((8, 8))
    lr = _left_matrix(a[:4])
    out[:4, :4] = lr
    out[4:, 4:] = lr
    out[4:, :4] = _left_matrix(a[4:])
    return out


def _dq_right_matrix(b: np.ndarray) -> np.ndarray:
    """Matrix of x -> x b (dual-quaternion product)."""
    out = np.zeros((8, 8))
    rr = _right_matrix(b[:4])
    out[:4, :4] = rr
    out[4:, 4:] = rr
    out[4:, :4] = _right_matrix(b[4:])
    return out


_DQ_CONJ = np.kron(np.eye(2), _CONJ4)


def _translation_jacobian(m: np.ndarray) -> np.ndarray:
    """3x8 Jacobian of the translation 2*vec(m_d m_r^*) of a unit dq."""
    out = np.zeros((3, 8))
    out[:, :4] = 2.0 * (_left_matrix(m[4:]) @ _CONJ4)[1:, :]
    out[:, 4:] = 2.0 * _right_matrix(quat.conjugate(m[:4]))[1:, :]
    return out


def _scatter(grad_blocks: np.ndarray, clip: EncodedClip) -> np.ndarray:
    """(F, J, D) block gradients into a (F, W) feature gradient."""
    out = np.zeros((clip.num_frames, clip.width))
    out[:, 3:] = grad_blocks.reshape(clip.num_frames, -1)
    return out


def _grad_mse(pred: EncodedClip, truth: EncodedClip) -> np.ndarray:
    diff = pred.joint_blocks() - truth.joint_blocks()
    return _scatter(2.0 * diff / diff.size, pred)


def _grad_regularization(pred: EncodedClip, truth: EncodedClip) -> np.ndarray:
    blocks = pred.joint_blocks()
    f, j, _ = blocks.shape
    norm_res, ortho_res = dualquat.unitary_residual(blocks)
    grad = np.empty_like(blocks)
    grad[..., :4] = (
        4.0 * norm_res[..., None] * blocks[..., :4]
        + 2.0 * ortho_res[..., None] * blocks[..., 4:]
    )
    grad[..., 4:] = 2.0 * ortho_res[..., None] * blocks[..., :4]
    return _scatter(grad / (f * j), pred)


def _grad_positional(pred: EncodedClip, truth: EncodedClip) -> np.ndarray:
    delta = _positions(pred) - _positions(truth)
    dist = np.linalg.norm(delta, axis=-1, keepdims=True)
    unit = delta / np.where(dist > 0, dist, 1.0)
    f, j, _ = delta.shape
    unit /= f * j
    blocks = pred.joint_blocks()
    grad = np.zeros_like(blocks)
    if pred.kind is ReprKind.POSITIONS:
        grad[...] = unit
    elif pred.kind is ReprKind.QUATERNIONS_POSITIONS:
        grad[..., 4:7] = unit
    elif pred.kind is ReprKind.ORTHO6D_POSITIONS:
        grad[..., 6:9] = unit
    else:  # dualquat: chain through normalization and translation
        for fi in range(f):
            for ji in range(j):
                d = blocks[fi, ji]
                chain = _translation_jacobian(dualquat.normalize(d)) @ _dq_normalize_jacobian(d)
                grad[fi, ji] = chain.T @ unit[fi, ji]
    return _scatter(grad, pred)


def _grad_offset(pred: EncodedClip, truth: EncodedClip, skeleton: Skeleton) -> np.ndarray:
    parents = _encoded_parents(pred.skeleton)
    blocks = pred.joint_blocks()
    f, j, _ = blocks.shape
    normalized = dualquat.normalize(blocks)
    expected = _skeleton_offsets(pred, skeleton)
    grad_normalized = np.zeros_like(normalized)
    scale = 1.0 / (f * (j - 1))
    for fi in range(f):
        for ji in range(1, j):
            parent = parents[ji]
            n_p, n_j = normalized[fi, parent], normalized[fi, ji]
            local = dualquat.mul(dualquat.conjugate(n_p), n_j)
            delta = dualquat.translation(local) - expected[ji]
            dist = np.linalg.norm(delta)
            if dist == 0.0:
                continue
            upstream = (_translation_jacobian(local).T @ (delta / dist)) * scale
            grad_normalized[fi, ji] += _dq_left_matrix(dualquat.conjugate(n_p)).T @ upstream
            grad_normalized[fi, parent] += (_dq_right_matrix(n_j) @ _DQ_CONJ).T @ upstream
    grad = np.empty_like(blocks)
    for fi in range(f):
        for ji in range(j):
            grad[fi, ji] = _dq_normalize_jacobian(blocks[fi, ji]).T @ grad_normalized[fi, ji]
    return _scatter(grad, pred)


def _grad_rotational(pred: EncodedClip, truth: EncodedClip, space: str) -> np.ndarray:
    parents = _encoded_parents(pred.skeleton)
    blocks = pred.joint_blocks()
    f, j, _ = blocks.shape
    raw = blocks[..., :4]
    unit = _normalized_quats(raw)
    q_truth = _rotation_quats(truth, space)

    if pred.kind is ReprKind.DUALQUAT:
        # unit quats are root-relative; local space divides by the parent.
        if space == "current":
            q_pred = unit
        else:
            q_pred = np.empty_like(unit)
            for row in range(j):
                parent = parents[row]
                q_pred[:, row] = (
                    unit[:, row]
                    if parent < 0
                    else quat.mul(quat.conjugate(unit[:, parent]), unit[:, row])
                )
    else:
        if space == "local":
            q_pred = unit
        else:
            q_pred = np.empty_like(unit)
            for row in range(j):
                parent = parents[row]
                q_pred[:, row] = (
                    unit[:, row]
                    if parent < 0
                    else quat.mul(q_pred[:, parent], unit[:, row])
                )

    signs = np.where(np.sum(q_pred * q_truth, axis=-1) >= 0, 1.0, -1.0)
    grad_unit = np.zeros_like(unit)
    scale = 1.0 / (f * j)

    if pred.kind is ReprKind.DUALQUAT and space == "local":
        for fi in range(f):
            for row in range(j):
                upstream = -signs[fi, row] * q_truth[fi, row] * scale
                parent = parents[row]
                if parent < 0:
                    grad_unit[fi, row] += upstream
                else:
                    grad_unit[fi, row] += _left_matrix(quat.conjugate(unit[fi, parent])).T @ upstream
                    grad_unit[fi, parent] += (
                        _right_matrix(unit[fi, row]) @ _CONJ4
                    ).T @ upstream
    elif pred.kind is not ReprKind.DUALQUAT and space == "current":
        # Reverse sweep: each current rotation feeds all its descendants.
        bar_current = -signs[..., None] * q_truth * scale
        for row in range(j - 1, -1, -1):
            parent = parents[row]
            if parent < 0:
                grad_unit[:, row] += bar_current[:, row]
            else:
                for fi in range(f):
                    grad_unit[fi, row] += _left_matrix(q_pred[fi, parent]).T @ bar_current[fi, row]
                    bar_current[fi, parent] += _right_matrix(unit[fi, row]).T @ bar_current[fi, row]
    else:
        grad_unit = -signs[..., None] * q_truth * scale

    grad = np.zeros_like(blocks)
    for fi in range(f):
        for row in range(j):
            grad[fi, row, :4] = _normalize_jacobian(raw[fi, row]).T @ grad_unit[fi, row]
    return _scatter(grad, pred)


@dataclass
class GradCheckResult:
    max_relative_deviation: float
    nondifferentiable: bool
    analytic: np.ndarray
    numeric: np.ndarray
    deviation_by_eps: dict


def _loss_value(name: str, pred: EncodedClip, truth: EncodedClip, skeleton: Skeleton) -> float:
    if name == "mse":
        return loss_mse(pred, truth)
    if name == "rotational_local":
        return loss_rotational(pred, truth, "local")
    if name == "rotational_current":
        return loss_rotational(pred, truth, "current")
    if name == "positional":
        return loss_positional(pred, truth)
    if name == "offset":
        return loss_offset(pred, skeleton)
    if name == "regularization":
        return loss_regularization(pred)
    raise ValueError(f"unknown loss {name!r}; expected one of {GRAD_LOSSES}")


def _analytic_gradient(name: str, pred: EncodedClip, truth: EncodedClip, skeleton: Skeleton):
    if name == "mse":
        return _grad_mse(pred, truth)
    if name == "rotational_local":
        return _grad_rotational(pred, truth, "local")
    if name == "rotational_current":
        return _grad_rotational(pred, truth, "current")
    if name == "positional":
        return _grad_positional(pred, truth)
    if name == "offset":
        return _grad_offset(pred, truth, skeleton)
    if name == "regularization":
        return _grad_regularization(pred, truth)
    raise ValueError(f"unknown loss {name!r}; expected one of {GRAD_LOSSES}")


def _boundary_proximity(name: str, pred: EncodedClip, truth: EncodedClip, skeleton: Skeleton) -> bool:
    """True when the point sits near a known kink of the loss surface."""
    if name in ("rotational_local", "rotational_current"):
        space = name.split("_")[1]
        _, _, dots = _rotational_terms(pred, truth, space)
        return bool(np.min(np.abs(dots)) < 1e-3)
    if name == "positional":
        dist = np.linalg.norm(_positions(pred) - _positions(truth), axis=-1)
        return bool(np.min(dist) < 1e-9)
    if name == "offset":
        dist = np.linalg.norm(
            _extracted_offsets(pred)[:, 1:, :] - _skeleton_offsets(pred, skeleton)[1:], axis=-1
        )
        return bool(np.min(dist) < 1e-9)
    return False


def grad_check(
    name: str,
    pred: EncodedClip,
    truth: EncodedClip,
    eps: float = 1e-6,
    truth_skeleton: Skeleton | None = None,
) -> GradCheckResult:
    """Compare the analytic gradient against central finite differences.

    The finite-difference gradient is recomputed over a ladder of epsilon
    scales; disagreement across scales, or proximity to a known kink
    (antipodal sign ties, zero distances), marks the point as
    non-differentiable rather than raising. The reported deviation is the
    largest componentwise difference relative to the gradient magnitude.
    """
    if not 1e-8 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-8, 1e-3]")
    skeleton = truth_skeleton if truth_skeleton is not None else truth.skeleton
    analytic = _analytic_gradient(name, pred, truth, skeleton)

    base = pred.features
    f, w = base.shape

    def fd_gradient(step: float) -> np.ndarray:
        out = np.zeros_like(base)
        for fi in range(f):
            for wi in range(w):
                bumped = base.copy()
                bumped[fi, wi] = base[fi, wi] + step
                plus = _loss_value(
                    name,
                    EncodedClip(pred.kind, pred.skeleton, pred.frame_time, bumped),
                    truth,
                    skeleton,
                )
                bumped[fi, wi] = base[fi, wi] - step
                minus = _loss_value(
                    name,
                    EncodedClip(pred.kind, pred.skeleton, pred.frame_time, bumped),
                    truth,
                    skeleton,
                )
                out[fi, wi] = (plus - minus) / (2.0 * step)
        return out

    ladder = sorted(set(GRAD_EPS_LADDER) | {eps}, reverse=True)
    numeric_by_eps = {step: fd_gradient(step) for step in ladder}
    numeric = numeric_by_eps[eps]

    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)), 1e-12)
    deviation_by_eps = {
        step: float(np.max(np.abs(analytic - grid)) / scale)
        for step, grid in numeric_by_eps.items()
    }

    cross_scale = 0.0
    for a in ladder:
        for b in ladder:
            if a < b:
                cross_scale = max(
                    cross_scale,
                    float(np.max(np.abs(numeric_by_eps[a] - numeric_by_eps[b])) / scale),
                )
    nondifferentiable = cross_scale > 1e-3 or _boundary_proximity(name, pred, truth, skeleton)

    return GradCheckResult(
        max_relative_deviation=deviation_by_eps[eps],
        nondifferentiable=nondifferentiable,
        analytic=analytic,
        numeric=numeric,
        deviation_by_eps=deviation_by_eps,
    )
