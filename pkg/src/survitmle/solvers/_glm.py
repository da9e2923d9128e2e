"""Weighted, offset, L1/L2-penalized linear and logistic regression.

Single regression engine shared by the hazard stacking models, the propensity
and entry models, the targeting fluctuations and the second-stage learner.
Elastic-net coordinate descent (glmnet-style) with warm-started lambda paths,
IRLS with step-halving for the logistic family, and K-fold cross-validation
for lambda selection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from ._backend import enet_cd

_ALPHA_FLOOR = 1e-3  # surrogate mixing used to define lambda_max when alpha ~ 0
_P_CLIP = 1e-10


class SolverError(ValueError):
    """Invalid solver input (dimensions, weights, response domain)."""


def soft_threshold(z: float, gamma: float) -> float:
    """sign(z) * max(|z| - gamma, 0)."""
    if gamma < 0:
        raise SolverError("gamma must be nonnegative")
    az = abs(z) - gamma
    if az <= 0.0:
        return 0.0
    return math.copysign(az, z)


@dataclass
class DesignMatrix:
    """Regression design. First column may be a constant intercept column,
    in which case it should be listed in FitSpec.unpenalized."""

    values: np.ndarray
    column_names: list[str] = field(default_factory=list)
    center: np.ndarray | None = None
    scale: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] < 1:
            raise SolverError("design must be a 2-d matrix with at least one column")
        if not np.all(np.isfinite(self.values)):
            raise SolverError("design contains non-finite entries")
        if not self.column_names:
            self.column_names = [f"x{j}" for j in range(self.values.shape[1])]


@dataclass
class FitSpec:
    """Fitting configuration. alpha=1 is the lasso, alpha=0 the ridge."""

    family: str = "linear"  # "linear" | "logistic"
    alpha: float = 1.0
    lambda_path: Sequence[float] | str = "auto"
    weights: np.ndarray | None = None
    offset: np.ndarray | None = None
    unpenalized: Sequence[int] = ()
    fit_intercept: bool = True
    standardize: bool = True
    max_iter: int = 2000
    tol: float = 1e-8
    n_lambda: int = 50
    lambda_min_ratio: float = 1e-4
    max_irls: int = 30
    irls_tol: float = 1e-8
    debug: bool = False

    def __post_init__(self):
        if self.family not in ("linear", "logistic"):
            raise SolverError(f"unknown family {self.family!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise SolverError("alpha must lie in [0, 1]")
        if self.tol <= 0:
            raise SolverError("tol must be positive")


@dataclass
class CoefVector:
    intercept: float
    betas: np.ndarray
    lambda_used: float
    converged: bool
    iterations: int

    def predict(self, X: np.ndarray, offset: np.ndarray | None = None,
                family: str = "linear") -> np.ndarray:
        eta = self.intercept + np.asarray(X, dtype=np.float64) @ self.betas
        if offset is not None:
            eta = eta + offset
        if family == "logistic":
            return expit(eta)
        return eta


def expit(eta: np.ndarray) -> np.ndarray:
    out = np.empty_like(eta, dtype=np.float64)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    ex = np.exp(eta[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class _Problem:
    """Standardized working copy of one regression problem."""

    def __init__(self, design: DesignMatrix, y: np.ndarray, spec: FitSpec):
        X = design.values
        n, d = X.shape
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (n,):
            raise SolverError("response length does not match design rows")
        if not np.all(np.isfinite(y)):
            raise SolverError("response contains non-finite entries")
        w = spec.weights
        if w is None:
            w = np.ones(n)
        else:
            w = np.asarray(w, dtype=np.float64)
            if w.shape != (n,):
                raise SolverError("weights length does not match design rows")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise SolverError("weights must be finite and nonnegative")
            if not np.any(w > 0):
                raise SolverError("all weights are zero")
        offset = spec.offset
        if offset is None:
            offset = np.zeros(n)
        else:
            offset = np.asarray(offset, dtype=np.float64)
            if offset.shape != (n,):
                raise SolverError("offset length does not match design rows")
        if spec.family == "logistic" and (y.min() < 0.0 or y.max() > 1.0):
            raise SolverError("logistic family requires responses in [0, 1]")

        self.spec = spec
        self.y = y
        self.offset = offset
        self.wn = w / w.sum()  # normalized row weights, sum 1

        pen = np.ones(d)
        for j in spec.unpenalized:
            pen[int(j)] = 0.0
        self.pen = pen

        if spec.standardize:
            if spec.fit_intercept:
                center = self.wn @ X
            else:
                center = np.zeros(d)
            Xc = X - center
            scale = np.sqrt(self.wn @ (Xc * Xc))
            dead = scale <= 0.0
            scale = np.where(dead, 1.0, scale)
            self.Xs = np.asfortranarray(Xc / scale)
        else:
            center = np.zeros(d)
            scale = np.ones(d)
            self.Xs = np.asfortranarray(X)
        self.center = center
        self.scale = scale
        # intercept handled as an explicit unpenalized, unstandardized column
        if spec.fit_intercept:
            self.Xw = np.asfortranarray(np.hstack([np.ones((n, 1)), self.Xs]))
            self.pen_w = np.concatenate([[0.0], pen])
        else:
            self.Xw = self.Xs
            self.pen_w = pen
        self.col_norm2 = (self.wn[:, None] * self.Xw * self.Xw).sum(axis=0)
        self.n, self.d = n, d

    def null_residual(self) -> np.ndarray:
        """Residual of the intercept-only (or empty) model, used for lambda_max."""
        if self.spec.family == "logistic":
            if self.spec.fit_intercept:
                mu = float(self.wn @ self.y)
                return self.y - mu
            return self.y - expit(self.offset)
        yw = self.y - self.offset
        if self.spec.fit_intercept:
            yw = yw - float(self.wn @ yw)
        return yw

    def lambda_max(self) -> float:
        r = self.null_residual()
        grads = np.abs(self.Xs.T @ (self.wn * r))
        grads = grads[self.pen > 0] if np.any(self.pen > 0) else grads
        gmax = float(grads.max()) if grads.size else 1.0
        return max(gmax, 1e-12) / max(self.spec.alpha, _ALPHA_FLOOR)

    def resolve_path(self) -> np.ndarray:
        lp = self.spec.lambda_path
        if isinstance(lp, str):
            if lp != "auto":
                raise SolverError(f"unknown lambda_path {lp!r}")
            lmax = self.lambda_max()
            lmin = lmax * self.spec.lambda_min_ratio
            return np.geomspace(lmax, lmin, self.spec.n_lambda)
        path = np.asarray(list(lp), dtype=np.float64)
        if path.size == 0 or np.any(path < 0):
            raise SolverError("lambda_path must be nonempty and nonnegative")
        if np.any(np.diff(path) > 0):
            raise SolverError("lambda_path must be non-increasing")
        return path

    # -- objective pieces (debug-mode monotonicity assertions) -----------

    def penalty_value(self, beta_w: np.ndarray, lam: float) -> float:
        b = beta_w[1:] if self.spec.fit_intercept else beta_w
        return lam * float(
            self.spec.alpha * np.abs(b * self.pen).sum()
            + 0.5 * (1.0 - self.spec.alpha) * ((b * self.pen) ** 2).sum()
        )

    def linear_objective(self, r: np.ndarray, wn: np.ndarray, beta_w: np.ndarray, lam: float) -> float:
        return 0.5 * float(wn @ (r * r)) + self.penalty_value(beta_w, lam)


def _cd_solve(prob: _Problem, Xw, wn, ywork, beta_w, lam: float, col_norm2=None):
    """Solve one weighted linear elastic-net problem by coordinate descent."""
    spec = prob.spec
    if col_norm2 is None:
        col_norm2 = (wn[:, None] * Xw * Xw).sum(axis=0)
    l1 = lam * spec.alpha * prob.pen_w
    l2 = lam * (1.0 - spec.alpha) * prob.pen_w
    r = ywork - Xw @ beta_w
    if spec.debug:
        sweeps_total = 0
        prev = prob.linear_objective(r, wn, beta_w, lam)
        converged = False
        while sweeps_total < spec.max_iter:
            s, md = enet_cd(Xw, wn, r, beta_w, col_norm2, l1, l2, 1, spec.tol)
            sweeps_total += 1
            cur = prob.linear_objective(r, wn, beta_w, lam)
            if cur > prev + 1e-10 * (abs(prev) + 1.0):
                raise AssertionError(
                    f"objective increased across a coordinate sweep: {prev} -> {cur}"
                )
            prev = cur
            if md < spec.tol:
                converged = True
                break
        return sweeps_total, (0.0 if converged else np.inf), r
    sweeps, max_delta = enet_cd(
        Xw, wn, r, beta_w, col_norm2, l1, l2, spec.max_iter, spec.tol
    )
    return sweeps, max_delta, r


def _ridge_closed_form(prob: _Problem, lam: float) -> tuple[np.ndarray, bool]:
    """Exact solve for the linear family with alpha == 0 (pure ridge)."""
    Xw, wn = prob.Xw, prob.wn
    ywork = prob.y - prob.offset
    G = Xw.T @ (wn[:, None] * Xw)
    G[np.diag_indices_from(G)] += lam * prob.pen_w
    b = Xw.T @ (wn * ywork)
    try:
        beta_w = np.linalg.solve(G, b)
    except np.linalg.LinAlgError:
        beta_w = np.linalg.lstsq(G, b, rcond=None)[0]
    return beta_w, True


def _finish(prob: _Problem, beta_w: np.ndarray, lam: float, converged: bool,
            iterations: int) -> CoefVector:
    if prob.spec.fit_intercept:
        b0_w, bs = float(beta_w[0]), beta_w[1:]
    else:
        b0_w, bs = 0.0, beta_w
    betas = bs / prob.scale
    intercept = b0_w - float(betas @ prob.center)
    if not (np.all(np.isfinite(betas)) and np.isfinite(intercept)):
        raise SolverError("fit produced non-finite coefficients")
    return CoefVector(intercept=intercept, betas=betas, lambda_used=float(lam),
                      converged=converged, iterations=iterations)


def _fit_linear_path(prob: _Problem, path: np.ndarray) -> list[CoefVector]:
    spec = prob.spec
    out = []
    beta_w = np.zeros(prob.Xw.shape[1])
    ywork = prob.y - prob.offset
    for lam in path:
        if spec.alpha == 0.0 and lam > 0.0:
            beta_w, ok = _ridge_closed_form(prob, lam)
            out.append(_finish(prob, beta_w.copy(), lam, ok, 1))
            continue
        sweeps, max_delta, _ = _cd_solve(prob, prob.Xw, prob.wn, ywork, beta_w, lam,
                                         col_norm2=prob.col_norm2)
        out.append(_finish(prob, beta_w.copy(), lam, max_delta < spec.tol, sweeps))
    return out


def _logistic_deviance(y, p, wn) -> float:
    p = np.clip(p, _P_CLIP, 1.0 - _P_CLIP)
    ll = y * np.log(p) + (1.0 - y) * np.log1p(-p)
    return -2.0 * float(wn @ ll)


def _fit_logistic_path(prob: _Problem, path: np.ndarray) -> list[CoefVector]:
    spec = prob.spec
    out = []
    beta_w = np.zeros(prob.Xw.shape[1])
    if spec.fit_intercept:
        mu = float(np.clip(prob.wn @ prob.y, _P_CLIP, 1 - _P_CLIP))
        beta_w[0] = math.log(mu / (1.0 - mu))
    for lam in path:
        beta_w, converged, iters = _irls(prob, beta_w, lam)
        out.append(_finish(prob, beta_w.copy(), lam, converged, iters))
    return out


def _irls(prob: _Problem, beta_w: np.ndarray, lam: float):
    """Penalized IRLS with step-halving; merit = mean deviance + 2*penalty."""
    spec = prob.spec
    Xw = prob.Xw
    eta = prob.offset + Xw @ beta_w
    p = expit(eta)
    merit = _logistic_deviance(prob.y, p, prob.wn) + 2.0 * prob.penalty_value(beta_w, lam)
    best = (beta_w.copy(), merit)
    converged = False
    it = 0
    for it in range(1, spec.max_irls + 1):
        pc = np.clip(p, _P_CLIP, 1.0 - _P_CLIP)
        v = pc * (1.0 - pc)
        wirls = prob.wn * v
        z = (eta - prob.offset) + (prob.y - pc) / v  # working response, offset excluded
        beta_prev = beta_w.copy()
        col_norm2 = (wirls[:, None] * Xw * Xw).sum(axis=0)
        l1 = lam * spec.alpha * prob.pen_w
        l2 = lam * (1.0 - spec.alpha) * prob.pen_w
        r = z - Xw @ beta_w
        enet_cd(Xw, wirls, r, beta_w, col_norm2, l1, l2, spec.max_iter, spec.tol)
        step = 1.0
        while True:
            trial = beta_prev + step * (beta_w - beta_prev)
            eta = prob.offset + Xw @ trial
            p = expit(eta)
            merit_new = (_logistic_deviance(prob.y, p, prob.wn)
                         + 2.0 * prob.penalty_value(trial, lam))
            if np.isfinite(merit_new) and merit_new <= merit + 1e-12:
                beta_w = trial
                break
            step *= 0.5
            if step < 1e-4:  # could not improve: return best previous iterate
                return best[0], False, it
        if merit_new < best[1]:
            best = (beta_w.copy(), merit_new)
        if abs(merit - merit_new) < spec.irls_tol * (abs(merit_new) + 0.1):
            converged = True
            merit = merit_new
            break
        merit = merit_new
    return best[0], converged, it


def fit_path(design: DesignMatrix, y: np.ndarray, spec: FitSpec) -> list[CoefVector]:
    """Fit the full (warm-started) lambda path; returns one CoefVector per lambda."""
    prob = _Problem(design, y, spec)
    path = prob.resolve_path()
    if spec.family == "logistic":
        return _fit_logistic_path(prob, path)
    return _fit_linear_path(prob, path)


def fit(design: DesignMatrix, y: np.ndarray, spec: FitSpec) -> CoefVector:
    """Fit and return coefficients at the final (smallest) path value."""
    return fit_path(design, y, spec)[-1]


def fit_at(design: DesignMatrix, y: np.ndarray, spec: FitSpec, lam: float) -> CoefVector:
    """Fit at a specific lambda, warm-starting down the auto path for stability."""
    prob = _Problem(design, y, spec)
    if isinstance(spec.lambda_path, str):
        lmax = prob.lambda_max()
        if lam >= lmax:
            path = [lam]
        else:
            npts = max(2, int(round(spec.n_lambda * min(1.0, math.log(lmax / max(lam, 1e-300)) /
                                                        -math.log(spec.lambda_min_ratio)))))
            path = list(np.geomspace(lmax, lam, npts))
    else:
        path = [v for v in spec.lambda_path if v > lam] + [lam]
    sub = replace(spec, lambda_path=path)
    return fit(design, y, sub)


def held_out_loss(coef: CoefVector, X: np.ndarray, y: np.ndarray,
                  weights: np.ndarray | None, offset: np.ndarray | None,
                  family: str) -> float:
    """Weighted MSE (linear) or mean deviance (logistic) on held-out rows."""
    n = X.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    wn = w / w.sum()
    if family == "logistic":
        p = coef.predict(X, offset=offset, family="logistic")
        return _logistic_deviance(y, p, wn)
    pred = coef.predict(X, offset=offset)
    r = y - pred
    return float(wn @ (r * r))


def cross_validate_lambda(design: DesignMatrix, y: np.ndarray, spec: FitSpec,
                          folds: int, seed: int = 0) -> float:
    """Pick the path lambda minimizing mean held-out loss over seeded folds."""
    if folds < 2:
        raise SolverError("folds must be at least 2")
    X = design.values
    n = X.shape[0]
    if n < folds:
        raise SolverError("more folds than rows")
    if np.unique(X, axis=0).shape[0] < folds:
        raise SolverError("fewer distinct rows than folds")
    prob = _Problem(design, y, spec)
    path = prob.resolve_path()
    rng = np.random.default_rng(seed)
    fold_id = np.empty(n, dtype=np.int64)
    fold_id[rng.permutation(n)] = np.arange(n) % folds

    w = spec.weights if spec.weights is not None else np.ones(n)
    off = spec.offset if spec.offset is not None else np.zeros(n)
    losses = np.zeros((folds, path.size))
    for f in range(folds):
        tr = fold_id != f
        te = ~tr
        sub = replace(spec, lambda_path=list(path), weights=w[tr], offset=off[tr])
        coefs = fit_path(DesignMatrix(X[tr], list(design.column_names)), y[tr], sub)
        for li, coef in enumerate(coefs):
            losses[f, li] = held_out_loss(coef, X[te], y[te], w[te], off[te], spec.family)
    mean_loss = losses.mean(axis=0)
    best = int(np.argmin(mean_loss))
    # ties favor the larger lambda (earlier in the path)
    for li in range(best):
        if mean_loss[li] <= mean_loss[best] + 1e-15:
            best = li
            break
    return float(path[best])
