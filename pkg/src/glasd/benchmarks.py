"""Standard box-domain test functions and their correlation-manifold variants.

The manifold variant of a function vectorizes the off-diagonal entries of a
correlation matrix (both (p,q) and (q,p), row-major) and rescales them before
applying the standard formula, so the identity matrix maps to the zero
vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainMismatchError
from .optimizer import BoxDomain


def ackley(x):
    x = np.asarray(x, dtype=float)
    d = x.size
    return (-20.0 * math.exp(-0.2 * math.sqrt(float(np.mean(x * x))))
            - math.exp(float(np.mean(np.cos(2 * math.pi * x))))
            + 20.0 + math.e)


def griewank(x):
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.size + 1)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0)


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2 * math.pi * x)))


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def sumsquares(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(np.arange(1, x.size + 1) * x * x))


# name -> (function, conventional box bounds, off-diagonal scale)
BENCHMARKS = {
    "ackley": (ackley, (-32.768, 32.768), 10.0),
    "griewank": (griewank, (-600.0, 600.0), 100.0),
    "rastrigin": (rastrigin, (-5.12, 5.12), 10.0),
    "rosenbrock": (rosenbrock, (-5.0, 10.0), 100.0),
    "sumsquares": (sumsquares, (-10.0, 10.0), 10.0),
}

VARIANTS = ("box", "corr-manifold")


@dataclass(frozen=True)
class BenchmarkSpec:
    """One benchmark instance: function, variant, and problem size."""

    name: str
    variant: str = "box"
    dim: int = 2          # box dimension, or matrix dimension M for corr-manifold
    scale: float | None = None

    def __post_init__(self):
        if self.name not in BENCHMARKS:
            raise ValueError(f"unknown benchmark {self.name!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "corr-manifold":
            canonical = BENCHMARKS[self.name][2]
            if self.scale is None:
                object.__setattr__(self, "scale", canonical)
            elif self.scale != canonical:
                raise ValueError(
                    f"{self.name} corr-manifold scale is fixed at {canonical}"
                )
            if self.dim < 2:
                raise ValueError("matrix dimension must be >= 2")
        elif self.dim < 1:
            raise ValueError("box dimension must be >= 1")


def vec_offdiag(C: np.ndarray, scale: float) -> np.ndarray:
    """Scaled off-diagonal entries, all ordered pairs, row-major; length M(M-1)."""
    C = np.asarray(C, dtype=float)
    mask = ~np.eye(C.shape[0], dtype=bool)
    return scale * C[mask]


def eval_benchmark(spec: BenchmarkSpec, point) -> float:
    """Evaluate the benchmark at a vector (box) or correlation matrix (manifold)."""
    func = BENCHMARKS[spec.name][0]
    if spec.variant == "box":
        x = np.asarray(point, dtype=float)
        if x.shape != (spec.dim,):
            raise DomainMismatchError(f"expected a vector of length {spec.dim}")
        return func(x)
    C = np.asarray(point, dtype=float)
    if C.shape != (spec.dim, spec.dim):
        raise DomainMismatchError(f"expected a {spec.dim} x {spec.dim} matrix")
    return func(vec_offdiag(C, spec.scale))


def benchmark_box_domain(name: str, dim: int) -> BoxDomain:
    """Conventional bounds for the box variant."""
    lo, hi = BENCHMARKS[name][1]
    return BoxDomain(np.full(dim, lo), np.full(dim, hi))


def corr_objective(spec: BenchmarkSpec):
    """Matrix objective for the corr-manifold variant of this benchmark."""
    if spec.variant != "corr-manifold":
        raise ValueError("spec is not a corr-manifold benchmark")
    func = BENCHMARKS[spec.name][0]
    scale = spec.scale
    return lambda C: func(vec_offdiag(C, scale))
