"""Input checking helpers in the style of ``sklearn.utils.validation``."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import ValidationError


def check_samples(X, y=None):
    """Return sample times as a 1-d float array (and ``y`` if given)."""
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValidationError("expected a single column of times")
        X = X[:, 0]
    if y is not None:
        y = check_array(y, ensure_2d=False, dtype=float)
        if y.shape != X.shape:
            raise ValidationError("X and y must have the same number of samples")
    return X, y


def check_uniform_times(t, rtol=1e-8):
    """Spacing and starting index of an equally spaced time grid ``t``.

    The first time must be an integer multiple (0 or more) of the spacing.
    """
    t = np.asarray(t, float)
    if t.size < 2:
        raise ValidationError("need at least two sample times")
    d = np.diff(t)
    dt = float(np.mean(d))
    if dt <= 0 or np.max(np.abs(d - dt)) > rtol * dt * max(1, t.size):
        raise ValidationError("sample times must be equally spaced and increasing")
    start = t[0] / dt
    if start < -rtol or abs(start - round(start)) > 1e-6:
        raise ValidationError("first sample time must be a nonnegative multiple of the spacing")
    return dt, int(round(start))


def check_trajectories(X, min_length=2):
    """2-d float array ``(n_members, length)`` from one or many trajectories."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    X = check_array(X, dtype=float)
    if X.shape[1] < min_length:
        raise ValidationError(f"trajectories must have at least {min_length} samples")
    return X


def check_positive(name, value, strict=True):
    if not np.isfinite(value) or (value <= 0 if strict else value < 0):
        raise ValidationError(f"{name} must be {'positive' if strict else 'nonnegative'}, got {value}")
    return value
