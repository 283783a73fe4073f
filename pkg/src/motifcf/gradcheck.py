"""Finite-difference verification of every differentiable operation.

``run_suite`` drives each loss/network chain at random, well-conditioned
parameter points and compares the reverse-mode gradient against central
finite differences. It is wired to both pytest and the ``gradcheck`` CLI
subcommand; a failure exits nonzero there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import NumericalError

FD_STEP = 1e-5
TOLERANCE = 1e-4
POINTS_PER_OP = 20


def fd_gradient(f, x, h=FD_STEP):
    """Central-difference gradient of scalar f at x (elementwise)."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat, gflat = x.ravel(), grad.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def max_error(analytic, numeric, floor=1.0):
    """Max |a - n| / max(floor, |a|, |n|) over all coordinates.

    The floor makes the comparison absolute for near-zero entries, which is
    the right reading of a relative tolerance for O(1)-scale losses.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(floor, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_scalar_fn(build, x0, h=FD_STEP):
    """Compare autodiff and FD gradients of ``build`` at ``x0``.

    ``build`` maps an ndarray to a scalar ``Tensor`` (rebuilding the graph on
    every call so FD re-evaluation sees fresh values).
    """
    leaf_holder = {}

    def run(x):
        leaf = ad.Tensor(x, requires_grad=True)
        leaf_holder["leaf"] = leaf
        return build(leaf)

    out = run(np.array(x0, dtype=np.float64))
    out.backward()
    analytic = leaf_holder["leaf"].grad
    if analytic is None:
        analytic = np.zeros_like(np.asarray(x0, dtype=np.float64))
    numeric = fd_gradient(lambda x: run(x).item(), x0, h=h)
    return max_error(analytic, numeric)


@dataclass
class CheckResult:
    name: str
    worst: float
    points: int

    @property
    def ok(self):
        return self.worst <= TOLERANCE


def run_suite(seed=0, points=POINTS_PER_OP, verbose=False):
    """Run the finite-difference suite over every differentiable op.

    Returns a list of CheckResult; raises NumericalError if any op fails.
    """
    from . import gan  # late import: gan depends on graphon/producer

    results = []
    for name, factory in gan.gradcheck_cases():
        rng = np.random.default_rng(seed ^ (hash(name) & 0x7FFFFFFF))
        worst = 0.0
        for _ in range(points):
            build, x0 = factory(rng)
            worst = max(worst, check_scalar_fn(build, x0))
        results.append(CheckResult(name, worst, points))
        if verbose:
            status = "ok" if results[-1].ok else "FAIL"
            print(f"  {name:<28s} max err {worst:.3e}  [{status}]")
    bad = [r for r in results if not r.ok]
    if bad:
        names = ", ".join(r.name for r in bad)
        raise NumericalError(f"gradient check failed for: {names}")
    return results
