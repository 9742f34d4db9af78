"""Radial test functions with exact derivatives of any order."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import calculus as jc


def _bump_jet(r, order, a, b):
    # exp(-1/(1 - t^2)) with t the affine map [a, b] -> [-1, 1]
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros((order + 1, r.size))
    inside = (r > a) & (r < b)
    if not inside.any():
        return out
    t = jc.affine(r[inside], order, 2.0 / (b - a), -(a + b) / (b - a))
    g = -jc.mul(t, t)
    g[0] += 1.0
    out[:, inside] = jc.exp(-jc.reciprocal(g))
    return out


def _step_jet(r, order, scale):
    # 1 on [0, scale], 0 on [2 scale, inf), h(y)/(h(y) + h(1-y)) in between
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros((order + 1, r.size))
    out[0, r <= scale] = 1.0
    mid = (r > scale) & (r < 2.0 * scale)
    if not mid.any():
        return out
    y = jc.affine(r[mid], order, -1.0 / scale, 2.0)
    one = jc.constant(1.0, order, y.shape[1])
    hy = jc.exp(-jc.reciprocal(y))
    hz = jc.exp(-jc.reciprocal(one - y))
    out[:, mid] = jc.mul(hy, jc.reciprocal(hy + hz))
    return out


@dataclass(frozen=True)
class RadialTestFunction:
    """Compactly supported smooth radial function.

    ``support`` is the closed interval outside of which the function
    vanishes; ``active`` is where its derivatives can be nonzero.  Both are
    ``(lo, hi)`` pairs in r.
    """

    kind: str
    params: tuple
    support: tuple
    active: tuple
    amplitude: float = 1.0
    tag: str = field(default="", compare=False)

    def jet(self, r, order):
        if self.kind == "bump":
            a, b = self.params
            c = _bump_jet(r, order, a, b)
        elif self.kind == "cutoff":
            (scale,) = self.params
            c = _step_jet(r, order, scale)
        elif self.kind == "dyadic":
            (k,) = self.params
            c = sum(_step_jet(r, order, 2.0**j) for j in range(k, 2 * k)) / k
        elif self.kind == "zero":
            c = np.zeros((order + 1, np.atleast_1d(r).size))
        else:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        return self.amplitude * c

    def __call__(self, r):
        return self.jet(r, 0)[0]

    def scaled(self, c):
        """Return c * phi."""
        return RadialTestFunction(self.kind, self.params, self.support,
                                  self.active, self.amplitude * c, self.tag)


def bump(a, b, amplitude=1.0):
    """exp(-1/(1 - t^2)) rescaled to the annulus a < r < b."""
    if not 0 <= a < b:
        raise ValueError("bump needs 0 <= a < b")
    return RadialTestFunction("bump", (float(a), float(b)), (a, b), (a, b),
                              amplitude, tag=f"bump[{a:g},{b:g}]")


def cutoff(R=1.0):
    """eta(x/R) with eta = 1 on B_1 and eta = 0 outside B_2."""
    return RadialTestFunction("cutoff", (float(R),), (0.0, 2.0 * R),
                              (R, 2.0 * R), tag=f"cutoff[R={R:g}]")


def dyadic(k):
    """(1/k) sum_{j=k}^{2k-1} eta(x / 2^j)."""
    if k < 1:
        raise ValueError("dyadic family index starts at 1")
    return RadialTestFunction("dyadic", (int(k),), (0.0, 2.0 ** (2 * k)),
                              (2.0**k, 2.0 ** (2 * k)), tag=f"dyadic[k={k}]")


def zero():
    return RadialTestFunction("zero", (), (1.0, 2.0), (1.0, 2.0), tag="zero")
