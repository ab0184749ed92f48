"""Affine coordinate patches for tracking in projective space.

A path lives in P^n; computation happens on the affine slice
<x, v> = 1 where <x, v> = sum_i x_i * conj(v_i).  Two strategies:

* ``fixed_random``  -- one random v per path, held fixed for its lifetime.
* ``orthogonal``    -- v equals the current point, renormalized to the
  unit sphere after every accepted step, so <x, x> = 1 and the tangent
  stays orthogonal to x.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PatchStrategy", "init_patch", "update_patch", "inner",
           "chordal_distance", "dehomogenize"]

KINDS = ("fixed_random", "orthogonal")


def inner(x: np.ndarray, v: np.ndarray) -> complex:
    """Hermitian inner product, conjugate-linear in the second argument."""
    return complex(np.vdot(v, x))


@dataclass
class PatchStrategy:
    kind: str
    vector: np.ndarray


def init_patch(kind: str, x0, rng_seed) -> PatchStrategy:
    """Create a patch through x0.

    ``fixed_random`` draws independent complex-Gaussian entries and
    rescales so <x0, v> = 1.  ``orthogonal`` sets v = x0/||x0||.  The
    caller still owns x0; pass it through update_patch to place it on
    the new slice.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown patch kind {kind!r}")
    x0 = np.asarray(x0, dtype=np.complex128)
    nrm = np.linalg.norm(x0)
    if nrm == 0:
        raise ValueError("cannot build a patch through the zero vector")
    if kind == "orthogonal":
        return PatchStrategy("orthogonal", x0 / nrm)
    rng = np.random.default_rng(rng_seed)
    n = x0.shape[0]
    while True:
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        ip = np.vdot(v, x0)
        if ip != 0:
            return PatchStrategy("fixed_random", v / np.conj(ip))


def update_patch(strategy: PatchStrategy, x) -> tuple[PatchStrategy, np.ndarray]:
    """Re-place x on the patch; only called after accepted steps.

    fixed_random rescales x so <x, v> = 1 and leaves v alone; orthogonal
    normalizes x to the unit sphere and moves v onto it.
    """
    x = np.asarray(x, dtype=np.complex128)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        raise ValueError("cannot rescale the zero vector onto a patch")
    if strategy.kind == "orthogonal":
        xn = x / nrm
        strategy.vector = xn
        return strategy, xn
    ip = np.vdot(strategy.vector, x)
    if ip == 0:
        raise ValueError("point lies on the hyperplane at infinity of the patch")
    return strategy, x / ip


def chordal_distance(x, y) -> float:
    """Distance between projective classes, sin of the principal angle.

    Computed as the norm of x's component orthogonal to y (both
    normalized first), which stays accurate for nearly equal classes.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        raise ValueError("the zero vector is not a projective point")
    xa = x / nx
    yb = y / ny
    resid = xa - np.vdot(yb, xa) * yb
    return min(float(np.linalg.norm(resid)), 1.0)


def dehomogenize(x) -> np.ndarray:
    """Affine coordinates x[1:] / x[0] of a homogeneous point."""
    x = np.asarray(x, dtype=np.complex128)
    if x[0] == 0:
        raise ValueError("cannot dehomogenize a point at infinity")
    return x[1:] / x[0]
