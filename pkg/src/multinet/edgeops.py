"""Binary operators combining two node vectors into one edge feature.

All four operators are elementwise and symmetric, so edge direction is
erased at featurization time.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import ValidationError

__all__ = ["EdgeOperator", "edge_feature", "edge_features"]


class EdgeOperator(Enum):
    """Operator names double as CLI/config tokens."""

    HADAMARD = "hadamard"
    AVERAGE = "average"
    WEIGHTED_L1 = "l1"
    WEIGHTED_L2 = "l2"

    @classmethod
    def from_token(cls, token: str) -> "EdgeOperator":
        for member in cls:
            if member.value == token:
                return member
        raise ValidationError(f"unknown operator {token!r}; expected one of "
                              f"{[m.value for m in cls]}")


def edge_features(op: EdgeOperator, fu: np.ndarray, fv: np.ndarray) -> np.ndarray:
    """Vectorized operator application; fu and fv may be (n, d) batches."""
    fu = np.asarray(fu, dtype=np.float64)
    fv = np.asarray(fv, dtype=np.float64)
    if fu.shape != fv.shape:
        raise ValidationError(f"vector shapes disagree: {fu.shape} vs {fv.shape}")
    if fu.shape[-1] < 1:
        raise ValidationError("vectors must have dimension >= 1")
    if op is EdgeOperator.HADAMARD:
        return fu * fv
    if op is EdgeOperator.AVERAGE:
        return (fu + fv) / 2.0
    if op is EdgeOperator.WEIGHTED_L1:
        return np.abs(fu - fv)
    if op is EdgeOperator.WEIGHTED_L2:
        return (fu - fv) ** 2
    raise ValidationError(f"unhandled operator {op}")  # pragma: no cover


def edge_feature(op: EdgeOperator, fu, fv) -> np.ndarray:
    """Edge feature for a single node-vector pair."""
    fu = np.atleast_1d(np.asarray(fu, dtype=np.float64))
    fv = np.atleast_1d(np.asarray(fv, dtype=np.float64))
    if fu.ndim != 1 or fv.ndim != 1:
        raise ValidationError("edge_feature expects 1-d vectors")
    return edge_features(op, fu, fv)
