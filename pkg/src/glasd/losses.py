"""Gaussian and robust correlation-fit objectives on squared Mahalanobis distances.

Every objective has the same shape,

    (n/2) * logdet(C) + (1/2) * sum_i rho(d_i^2),

where ``d_i^2 = x_i^T C^{-1} x_i`` and ``rho`` is the identity (gaussian), the
Huber transition to a linear tail, a hard cap (truncated), or the biweight
plateau (tukey).  Distances are computed through the Cholesky factor of C
with triangular solves; no matrix is ever inverted explicitly.

Thresholds for the robust kinds live on the d^2 scale.  Two automatic
policies exist:

* ``iqr-auto`` (default): the cutoff is Q3 + 3*IQR of the squared distances
  under the candidate matrix itself, recomputed at every evaluation.  The
  objective stays a deterministic function of (data, C); crucially it is
  bounded below, because the bulk of the sample always sits on the quadratic
  branch.  A frozen cutoff leaves the truncated and biweight objectives
  unbounded: once every distance saturates, log det alone drives the fit to
  a degenerate matrix.
* ``iqr-pilot``: the same rule evaluated once under a shrunk
  sample-correlation pilot and frozen for the whole optimization; kept for
  diagnostics and comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    DegenerateDataError,
    DomainMismatchError,
    MalformedDataError,
    NotPositiveDefiniteError,
)

LOSS_KINDS = ("gaussian", "huber", "truncated", "tukey")
THRESHOLD_POLICIES = ("iqr-auto", "iqr-pilot")


@dataclass(frozen=True)
class DataMatrix:
    """n x p observation matrix with optional column labels."""

    values: np.ndarray
    column_names: list[str] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.ndim != 2:
            raise MalformedDataError("data must be two-dimensional")
        n, p = v.shape
        if n < 2 or p < 2:
            raise MalformedDataError("need at least 2 rows and 2 columns")
        if not np.isfinite(v).all():
            raise MalformedDataError("data contains NaN or infinite entries")
        if self.column_names is not None and len(self.column_names) != p:
            raise MalformedDataError("column_names length does not match data width")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def names(self) -> list[str]:
        if self.column_names is not None:
            return list(self.column_names)
        return [f"x{j + 1}" for j in range(self.p)]


@dataclass(frozen=True)
class LossSpec:
    """Loss family plus its threshold: a number on the d^2 scale or a policy."""

    kind: str = "gaussian"
    threshold: float | str | None = None
    pilot_shrinkage_floor: float = 1e-3

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind != "gaussian":
            if self.threshold is None:
                raise ValueError(
                    f"{self.kind} loss requires a threshold number or policy "
                    f"{THRESHOLD_POLICIES}"
                )
            if isinstance(self.threshold, str) and self.threshold not in THRESHOLD_POLICIES:
                raise ValueError(
                    f"threshold must be a positive number or one of {THRESHOLD_POLICIES}"
                )
            if not isinstance(self.threshold, str) and self.threshold <= 0:
                raise ValueError("fixed threshold must be positive")
        if self.pilot_shrinkage_floor <= 0:
            raise ValueError("pilot_shrinkage_floor must be positive")


def _values(X) -> np.ndarray:
    if isinstance(X, DataMatrix):
        return X.values
    return np.asarray(X, dtype=float)


def _chol(C: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(np.asarray(C, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("matrix is not positive definite") from exc


def mahalanobis_sq_all(X, C) -> np.ndarray:
    """Squared Mahalanobis distance of every row of X under metric C."""
    V = _values(X)
    C = np.asarray(C, dtype=float)
    if V.shape[1] != C.shape[0]:
        raise DomainMismatchError(
            f"data has {V.shape[1]} columns but the matrix is {C.shape[0]} x {C.shape[0]}"
        )
    L = _chol(C)
    Y = solve_triangular(L, V.T, lower=True, check_finite=False)
    return np.einsum("ij,ij->j", Y, Y)


def _logdet_from_chol(L: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def loss_gaussian(X, C) -> float:
    """Gaussian fit objective (negative log-likelihood up to a constant)."""
    V = _values(X)
    L = _chol(np.asarray(C, dtype=float))
    if V.shape[1] != L.shape[0]:
        raise DomainMismatchError("data width does not match matrix dimension")
    return _fit_loss_from_factor(V, L, "gaussian", None)


def rho_huber(d2, delta: float):
    """Quadratic below delta, linear in d = sqrt(d2) above it; continuous at the knot."""
    d2 = np.asarray(d2, dtype=float)
    out = np.where(d2 <= delta, d2, 2.0 * math.sqrt(delta) * np.sqrt(d2) - delta)
    return float(out) if out.ndim == 0 else out


def rho_tukey(d2, tau: float):
    """Biweight: rises to the plateau tau^2/6 at d2 = tau^2 and stays there."""
    d2 = np.asarray(d2, dtype=float)
    tau2 = tau * tau
    inner = 1.0 - np.minimum(d2, tau2) / tau2
    out = (tau2 / 6.0) * (1.0 - inner**3)
    return float(out) if out.ndim == 0 else out


def rho_truncated(d2, tau: float):
    """Hard cap at tau."""
    d2 = np.asarray(d2, dtype=float)
    out = np.minimum(d2, tau)
    return float(out) if out.ndim == 0 else out


def _auto_cutoff(d2: np.ndarray) -> float:
    """Q3 + 3*IQR of d2, quartiles by linear interpolation at (n-1)*q.

    Sort-based equivalent of the np.quantile default, kept cheap because it
    runs once per objective evaluation.
    """
    s = np.sort(d2)
    n = s.size
    vals = []
    for q in (0.25, 0.75):
        pos = (n - 1) * q
        k = int(pos)
        k1 = k + 1 if k + 1 < n else k
        vals.append(s[k] + (pos - k) * (s[k1] - s[k]))
    q1, q3 = vals
    return max(float(q3 + 3.0 * (q3 - q1)), 1e-12)


def _fit_loss_from_factor(V: np.ndarray, L: np.ndarray, kind: str, thr) -> float:
    """Shared objective core given the lower Cholesky factor of the metric.

    ``thr == 'iqr-auto'`` resolves the cutoff from the distances under this
    very metric (Q3 + 3*IQR of the d^2 sample).
    """
    Y = solve_triangular(L, V.T, lower=True, check_finite=False)
    d2 = np.einsum("ij,ij->j", Y, Y)
    if kind == "gaussian":
        rho_sum = float(np.sum(d2))
    else:
        if thr == "iqr-auto":
            thr = _auto_cutoff(d2)
        if kind == "huber":
            rho_sum = float(np.sum(rho_huber(d2, thr)))
        elif kind == "truncated":
            rho_sum = float(np.sum(rho_truncated(d2, thr)))
        else:
            rho_sum = float(np.sum(rho_tukey(d2, math.sqrt(thr))))
    return 0.5 * V.shape[0] * _logdet_from_chol(L) + 0.5 * rho_sum


def _loss_threshold(spec: LossSpec):
    """Threshold to hand the objective core; pilot policies must be resolved."""
    thr = spec.threshold
    if thr is None or thr == "iqr-pilot":
        raise ValueError(
            "threshold not resolved to a number (resolve 'iqr-pilot' with "
            "resolve_threshold first)"
        )
    return thr


def loss_robust(X, C, spec: LossSpec) -> float:
    """Robust fit objective with rho chosen by spec.kind.

    A numeric threshold (d^2 scale; for tukey it is the plateau location
    tau^2) is used as given; 'iqr-auto' recomputes the cutoff from the
    distances under C itself.  'iqr-pilot' must be resolved to a number first
    with :func:`resolve_threshold`.
    """
    if spec.kind == "gaussian":
        return loss_gaussian(X, C)
    thr = _loss_threshold(spec)
    V = _values(X)
    L = _chol(np.asarray(C, dtype=float))
    if V.shape[1] != L.shape[0]:
        raise DomainMismatchError("data width does not match matrix dimension")
    return _fit_loss_from_factor(V, L, spec.kind, thr)


def loss_robust_from_factor(X, L: np.ndarray, spec: LossSpec) -> float:
    """Same objective as loss_robust for C = L L^T, evaluated from the factor.

    ``L`` must be lower triangular with positive diagonal, as produced by the
    hyperspherical row construction; no factorization happens here.
    """
    thr = None if spec.kind == "gaussian" else _loss_threshold(spec)
    V = _values(X)
    if V.shape[1] != L.shape[0]:
        raise DomainMismatchError("data width does not match matrix dimension")
    return _fit_loss_from_factor(V, L, spec.kind, thr)


def iqr_threshold(values, multiplier: float = 3.0) -> float:
    """Q3 + multiplier * (Q3 - Q1), quartiles by linear interpolation."""
    v = np.asarray(values, dtype=float)
    if v.size < 4:
        raise ValueError("need at least 4 values for quartiles")
    q1, q3 = np.quantile(v, [0.25, 0.75])
    return float(q3 + multiplier * (q3 - q1))


def sample_correlation(X) -> np.ndarray:
    """Classical sample correlation matrix; errors on zero-variance columns."""
    V = _values(X)
    sd = V.std(axis=0, ddof=1)
    if np.any(sd == 0.0):
        bad = int(np.flatnonzero(sd == 0.0)[0])
        raise DegenerateDataError(f"column {bad} has zero variance")
    Z = (V - V.mean(axis=0)) / sd
    S = (Z.T @ Z) / (V.shape[0] - 1)
    S = (S + S.T) * 0.5
    np.fill_diagonal(S, 1.0)
    return np.clip(S, -1.0, 1.0)


def standardize_columns(X) -> np.ndarray:
    """Column-wise (value - mean) / sd with sample sd; errors on constant columns."""
    V = _values(X)
    sd = V.std(axis=0, ddof=1)
    if np.any(sd == 0.0):
        bad = int(np.flatnonzero(sd == 0.0)[0])
        raise DegenerateDataError(f"column {bad} has zero variance")
    return (V - V.mean(axis=0)) / sd


def shrink_to_pd(S: np.ndarray, eig_floor: float = 1e-3) -> np.ndarray:
    """Identity shrinkage (S + lam*I)/(1 + lam) with minimal lam reaching the floor.

    The shrunk minimum eigenvalue is (mu_min + lam)/(1 + lam), monotone in
    lam, so the minimal lam has the closed form (floor - mu_min)/(1 - floor).
    Unit diagonals are preserved exactly.
    """
    S = np.asarray(S, dtype=float)
    if not 0 < eig_floor < 1:
        raise ValueError("eig_floor must lie in (0, 1)")
    mu_min = float(np.linalg.eigvalsh(S).min())
    lam = max(0.0, (eig_floor - mu_min) / (1.0 - eig_floor))
    if lam == 0.0:
        return S.copy()
    out = (S + lam * np.eye(S.shape[0])) / (1.0 + lam)
    out = (out + out.T) * 0.5
    np.fill_diagonal(out, 1.0)
    return out


def pilot_correlation(X, eig_floor: float = 1e-3) -> np.ndarray:
    """Shrunk sample correlation used to freeze thresholds and warm-start searches."""
    return shrink_to_pd(sample_correlation(X), eig_floor)


def resolve_threshold(X, spec: LossSpec) -> float:
    """IQR cutoff frozen from distances under the shrunk-sample-correlation pilot.

    Returns Q3 + 3*IQR of the squared Mahalanobis distances computed once
    under the pilot correlation.  The value is on the d^2 scale for every loss
    kind (for tukey it is the plateau location tau^2).
    """
    if spec.threshold not in THRESHOLD_POLICIES:
        raise ValueError("resolve_threshold only applies to policy thresholds")
    pilot = pilot_correlation(X, spec.pilot_shrinkage_floor)
    d2 = mahalanobis_sq_all(X, pilot)
    return iqr_threshold(d2, 3.0)


def resolved_spec(X, spec: LossSpec) -> LossSpec:
    """Copy of spec with a frozen-pilot policy replaced by its number.

    The per-evaluation 'iqr-auto' policy passes through untouched; it is
    resolved inside the loss at every evaluation.
    """
    if spec.kind == "gaussian" or spec.threshold != "iqr-pilot":
        return spec
    return LossSpec(kind=spec.kind,
                    threshold=resolve_threshold(X, spec),
                    pilot_shrinkage_floor=spec.pilot_shrinkage_floor)


def outlier_report(X) -> list[tuple[str, int]]:
    """Per-column count of entries outside the 1.5*IQR fences."""
    X = X if isinstance(X, DataMatrix) else DataMatrix(np.asarray(X, dtype=float))
    counts = []
    for j, name in enumerate(X.names()):
        col = X.values[:, j]
        q1, q3 = np.quantile(col, [0.25, 0.75])
        iqr = q3 - q1
        lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        counts.append((name, int(np.sum((col < lo) | (col > hi)))))
    return counts


def read_data_csv(path) -> DataMatrix:
    """Load a comma-separated UTF-8 data file, auto-detecting a header row.

    A first row with any cell that does not parse as a number is taken as the
    header.  Ragged rows, non-numeric body cells, and non-finite values are
    hard errors.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise MalformedDataError(f"{path}: empty file")

    def parse_row(cells, idx):
        out = []
        for cell in cells:
            try:
                val = float(cell)
            except ValueError:
                raise MalformedDataError(
                    f"{path}: non-numeric cell {cell!r} in row {idx + 1}"
                ) from None
            if not math.isfinite(val):
                raise MalformedDataError(f"{path}: non-finite value in row {idx + 1}")
            out.append(val)
        return out

    names = None
    start = 0
    try:
        parse_row(rows[0], 0)
    except MalformedDataError:
        names = [c.strip() for c in rows[0]]
        start = 1
    width = len(rows[0])
    data = []
    for idx in range(start, len(rows)):
        if len(rows[idx]) != width:
            raise MalformedDataError(
                f"{path}: row {idx + 1} has {len(rows[idx])} cells, expected {width}"
            )
        data.append(parse_row(rows[idx], idx))
    if not data:
        raise MalformedDataError(f"{path}: no data rows")
    return DataMatrix(np.asarray(data, dtype=float), column_names=names)
