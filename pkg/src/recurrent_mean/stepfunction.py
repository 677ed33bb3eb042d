from __future__ import annotations

import numpy as np


class StepFunction:
    """Right-continuous piecewise-constant function on ``[0, inf)``.

    Takes ``initial`` on ``[0, breakpoints[0])`` and ``values[i]`` on
    ``[breakpoints[i], breakpoints[i+1])``.

    Examples
    --------
    >>> f = StepFunction([1.0, 2.0], [0.5, 0.75])
    >>> f(1.0), f.left_limit(1.0)
    (0.5, 0.0)
    """

    __slots__ = ("breakpoints", "values", "initial")

    def __init__(self, breakpoints, values, initial: float = 0.0):
        bp = np.array(breakpoints, dtype=np.float64).reshape(-1)
        vals = np.array(values, dtype=np.float64).reshape(-1)
        if bp.shape != vals.shape:
            raise ValueError("breakpoints and values must have the same length")
        if bp.size and (np.any(np.diff(bp) <= 0) or bp[0] < 0):
            raise ValueError("breakpoints must be non-negative and strictly increasing")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "initial", float(initial))

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def constant(cls, c: float = 0.0) -> StepFunction:
        return cls([], [], c)

    def _lookup(self, idx):
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)] if self.values.size else 0.0, self.initial)
        return out

    def value_at(self, t):
        """f(t), scalar or array."""
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.breakpoints, t, side="right") - 1
        out = self._lookup(idx)
        return float(out) if out.ndim == 0 else out

    __call__ = value_at

    def left_limit(self, t):
        """f(t-), scalar or array."""
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.breakpoints, t, side="left") - 1
        out = self._lookup(idx)
        return float(out) if out.ndim == 0 else out

    def __add__(self, other: StepFunction) -> StepFunction:
        if not isinstance(other, StepFunction):
            return NotImplemented
        bp = np.union1d(self.breakpoints, other.breakpoints)
        return StepFunction(bp, self.value_at(bp) + other.value_at(bp), self.initial + other.initial)

    def __len__(self):
        return self.breakpoints.size

    def __repr__(self):
        return f"StepFunction(n_breakpoints={len(self)}, initial={self.initial:g})"
