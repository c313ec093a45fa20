"""Recurrent reinforcement-learning trader.

Forward pass: Y_t = row-sums of X_t * Theta, f_t = tanh(Y_t), portfolio
weights F_t = softmax(f_t). The feature row for stock a is
[1, ta_t^1..ta_t^n, F_{t-1}^a], so the map is recurrent in the weights.
Training maximizes the moment-form Sharpe ratio of one-stage profits by
analytic gradient ascent with l2 decay.

Two gradient modes exist. ``collapsed`` propagates an m x (n+2) matrix
through the recurrence DF.Df.(X_t + diag(theta')·G_{t-1}) and is the
default. ``exact`` propagates the true m x m x (n+2) tensor
J_t[a,b,:] = dF_t^a/dtheta^b; it is the one that matches finite
differences of the unrolled objective and backs the gradient tests. The
collapsed form is a dimensional simplification of the exact recursion, so
the two directions generally differ.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DataError, NumericalError

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-18
GRADIENT_MODES = ("collapsed", "exact")


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters; defaults follow the reference setup."""

    window: int = 100
    learning_rate: float = 0.1
    l2: float = 0.01
    cost_rate: float = 0.001
    max_epochs: int = 100
    seed: int = 42
    epsilon: float = 0.0
    gradient_mode: str = "collapsed"

    def __post_init__(self) -> None:
        if self.window < 2:
            raise DataError(f"window must be >= 2, got {self.window}")
        if self.max_epochs < 1:
            raise DataError(f"max_epochs must be >= 1, got {self.max_epochs}")
        for name in ("learning_rate", "l2", "cost_rate"):
            if getattr(self, name) < 0:
                raise DataError(f"{name} must be >= 0")
        if self.gradient_mode not in GRADIENT_MODES:
            raise DataError(f"gradient_mode must be one of {GRADIENT_MODES}")


class SharpeValue(NamedTuple):
    value: float
    degenerate: bool


def softmax(f: np.ndarray) -> np.ndarray:
    """Overflow-safe softmax via max subtraction."""
    z = np.exp(f - np.max(f))
    return z / np.sum(z)


def assemble_features(ta_row: np.ndarray, f_prev: np.ndarray) -> np.ndarray:
    """Stack [1, ta_t^1..ta_t^n, F_{t-1}^a] rows into the m x (n+2) matrix."""
    m = ta_row.shape[0]
    return np.column_stack([np.ones(m), ta_row, f_prev])


def forward(x: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Y_t, f_t, F_t) for one period."""
    if x.shape != theta.shape:
        raise DataError(f"feature shape {x.shape} != parameter shape {theta.shape}")
    if not np.isfinite(x).all():
        raise NumericalError("forward: non-finite feature values")
    y = np.sum(x * theta, axis=1)
    f = np.tanh(y)
    return y, f, softmax(f)


def step_return(
    f_prev: np.ndarray, f_cur: np.ndarray, r: np.ndarray, cost_rate: float
) -> float:
    """One-stage profit: (1 + F_{t-1}.r_t)(1 - cost * turnover) - 1."""
    gross = 1.0 + float(np.dot(f_prev, r))
    turnover = float(np.sum(np.abs(f_cur - f_prev)))
    return gross * (1.0 - cost_rate * turnover) - 1.0


def sharpe(returns: np.ndarray) -> SharpeValue:
    """Moment-form Sharpe A/sqrt(B - A^2); degenerate variance -> sentinel.

    Zero-variance windows return +/-inf by the sign of the mean (0 when the
    mean is 0) with ``degenerate`` set so training treats them as converged.
    """
    r = np.asarray(returns, dtype=np.float64)
    if r.size < 2:
        raise DataError(f"sharpe needs >= 2 returns, got {r.size}")
    a = float(np.mean(r))
    b = float(np.mean(r * r))
    var = b - a * a
    if var < VARIANCE_FLOOR:
        value = 0.0 if a == 0.0 else float(np.sign(a)) * np.inf
        return SharpeValue(value=value, degenerate=True)
    return SharpeValue(value=a / np.sqrt(var), degenerate=False)


def sharpe_sensitivities(returns: np.ndarray) -> np.ndarray:
    """dS/dR_t for each t: (dS/dA)/T + (dS/dB)(2 R_t/T)."""
    r = np.asarray(returns, dtype=np.float64)
    t = r.size
    a = float(np.mean(r))
    b = float(np.mean(r * r))
    var = b - a * a
    if var < VARIANCE_FLOOR:
        raise NumericalError("sharpe_sensitivities: degenerate return variance")
    denom = var ** 1.5
    ds_da = b / denom
    ds_db = -a / (2.0 * denom)
    return ds_da / t + ds_db * (2.0 * r / t)


def return_partials(
    f_prev: np.ndarray, f_cur: np.ndarray, r: np.ndarray, cost_rate: float
) -> tuple[np.ndarray, np.ndarray]:
    """(dR_t/dF_t, dR_t/dF_{t-1}) with sgn(0) = 0 at the turnover kink."""
    gross = 1.0 + float(np.dot(f_prev, r))
    sgn = np.sign(f_cur - f_prev)
    turnover = float(np.sum(np.abs(f_cur - f_prev)))
    d_cur = -cost_rate * gross * sgn
    d_prev = (1.0 - cost_rate * turnover) * r + cost_rate * gross * sgn
    return d_cur, d_prev


def softmax_jacobian(f: np.ndarray) -> np.ndarray:
    """dF^i/df^j = S_i(delta_ij - S_j)."""
    s = softmax(f)
    return np.diag(s) - np.outer(s, s)


def tanh_jacobian(y: np.ndarray) -> np.ndarray:
    """diag(1 - tanh^2(Y^i))."""
    return np.diag(1.0 - np.tanh(y) ** 2)


def init_grad_state(m: int, width: int, mode: str) -> np.ndarray:
    """Zero gradient state: m x width (collapsed) or m x m x width (exact)."""
    if mode == "collapsed":
        return np.zeros((m, width))
    if mode == "exact":
        return np.zeros((m, m, width))
    raise DataError(f"unknown gradient mode {mode!r}")


def grad_state_update(
    g_prev: np.ndarray,
    x: np.ndarray,
    theta: np.ndarray,
    f: np.ndarray,
    y: np.ndarray,
    mode: str = "collapsed",
) -> np.ndarray:
    """One recursion step of the weight-gradient state.

    collapsed: G_t = DF.Df.(X_t + diag(theta')·G_{t-1}), the m x (n+2)
    matrix recursion taken at face value.
    exact: J_t[a,b,:] = sum_c [DF.Df]_{a,c}(1[c=b] x_t^c + theta'_c J_{t-1}[c,b,:]),
    the true tensor chain rule through the recurrent input.
    """
    # f is tanh(y), so 1 - f^2 is the tanh jacobian diagonal (y kept in the
    # signature for callers that have not materialized f).
    dfd = softmax_jacobian(f) * (1.0 - f * f)[None, :]
    theta_rec = theta[:, -1]
    if mode == "collapsed":
        if g_prev.ndim != 2:
            raise DataError("collapsed mode expects a 2-d gradient state")
        return dfd @ (x + theta_rec[:, None] * g_prev)
    if mode == "exact":
        if g_prev.ndim != 3:
            raise DataError("exact mode expects a 3-d gradient state")
        direct = dfd[:, :, None] * x[None, :, :]
        carried = np.tensordot(dfd * theta_rec[None, :], g_prev, axes=(1, 0))
        return direct + carried
    raise DataError(f"unknown gradient mode {mode!r}")


@dataclass
class Trajectory:
    """One forward sweep: S steps of weights, profits, and gradient state.

    ``weights`` has S+1 rows; row 0 is the initial weight vector (the zero
    vector at a window start, by construction off the simplex so the first
    rebalance is charged full turnover).
    """

    y: np.ndarray  # (S, m)
    f: np.ndarray  # (S, m)
    weights: np.ndarray  # (S+1, m)
    profits: np.ndarray  # (S,)
    wealth: np.ndarray  # (S,), W_0 = 1 convention
    returns: np.ndarray  # (S, m) slice used
    cost_rate: float
    mode: str
    grads: list[np.ndarray] | None  # length S+1 when recorded

    @property
    def steps(self) -> int:
        return self.profits.shape[0]


def sweep(
    theta: np.ndarray,
    features: np.ndarray,
    returns: np.ndarray,
    f_init: np.ndarray,
    cost_rate: float,
    mode: str = "collapsed",
    with_grads: bool = True,
) -> Trajectory:
    """Forward pass over ``features``/``returns`` rows with fixed theta.

    Row i supplies the indicator block of X at step i and the market return
    earned by the weights held coming into step i.
    """
    feats = np.asarray(features, dtype=np.float64)
    rets = np.asarray(returns, dtype=np.float64)
    if feats.ndim != 3:
        raise DataError(f"features must be (steps, m, n), got {feats.shape}")
    steps, m, n = feats.shape
    if rets.shape != (steps, m):
        raise DataError(f"returns shape {rets.shape} != ({steps}, {m})")
    if theta.shape != (m, n + 2):
        raise DataError(f"theta shape {theta.shape} != ({m}, {n + 2})")
    if f_init.shape != (m,):
        raise DataError(f"f_init shape {f_init.shape} != ({m},)")
    y_hist = np.empty((steps, m))
    f_hist = np.empty((steps, m))
    w_hist = np.empty((steps + 1, m))
    profits = np.empty(steps)
    w_hist[0] = f_init
    grads: list[np.ndarray] | None = None
    if with_grads:
        grads = [init_grad_state(m, n + 2, mode)]
    f_prev = f_init
    for i in range(steps):
        x = assemble_features(feats[i], f_prev)
        y, f, f_cur = forward(x, theta)
        y_hist[i] = y
        f_hist[i] = f
        w_hist[i + 1] = f_cur
        profits[i] = step_return(f_prev, f_cur, rets[i], cost_rate)
        if grads is not None:
            grads.append(grad_state_update(grads[-1], x, theta, f, y, mode))
        f_prev = f_cur
    return Trajectory(
        y=y_hist,
        f=f_hist,
        weights=w_hist,
        profits=profits,
        wealth=np.cumprod(1.0 + profits),
        returns=rets,
        cost_rate=cost_rate,
        mode=mode,
        grads=grads,
    )


def sharpe_total_gradient(traj: Trajectory) -> np.ndarray:
    """dS/dTheta accumulated over a recorded trajectory."""
    if traj.steps == 0:
        raise DataError("empty trajectory")
    if traj.grads is None:
        raise DataError("trajectory recorded without gradient state")
    sens = sharpe_sensitivities(traj.profits)
    total = np.zeros_like(traj.grads[0][0] if traj.mode == "exact" else traj.grads[0])
    for i in range(traj.steps):
        d_cur, d_prev = return_partials(
            traj.weights[i], traj.weights[i + 1], traj.returns[i], traj.cost_rate
        )
        g_cur = traj.grads[i + 1]
        g_prev = traj.grads[i]
        if traj.mode == "collapsed":
            k = d_cur[:, None] * g_cur + d_prev[:, None] * g_prev
        else:
            k = np.tensordot(d_cur, g_cur, axes=(0, 0)) + np.tensordot(
                d_prev, g_prev, axes=(0, 0)
            )
        total += sens[i] * k
    return total


def update_params(
    theta: np.ndarray, grad: np.ndarray, learning_rate: float, l2: float
) -> np.ndarray:
    """Gradient ascent with decay: (1 - rho·lambda)·Theta + rho·dS/dTheta."""
    if theta.shape != grad.shape:
        raise DataError(f"theta shape {theta.shape} != grad shape {grad.shape}")
    return (1.0 - learning_rate * l2) * theta + learning_rate * grad


@dataclass
class TrainResult:
    theta: np.ndarray
    sharpe_log: list[float]
    final_weights: np.ndarray
    degenerate: bool

    @property
    def epochs_run(self) -> int:
        return len(self.sharpe_log)


def train(
    features: np.ndarray,
    returns: np.ndarray,
    config: TrainConfig,
    theta0: np.ndarray | None = None,
) -> TrainResult:
    """Gradient-ascent training over one window.

    The window has ``config.window`` rows; the sweep runs over rows 1..T-1
    with zero initial weights and zero gradient state. Stops when two
    consecutive epoch Sharpes differ by at most epsilon (checkable from
    epoch 2 on), on a degenerate/non-finite Sharpe, or at max_epochs; the
    returned theta is the one that produced the last completed epoch.
    """
    feats = np.asarray(features, dtype=np.float64)
    rets = np.asarray(returns, dtype=np.float64)
    if feats.ndim != 3 or feats.shape[0] != config.window:
        raise DataError(
            f"features shape {feats.shape} does not match window {config.window}"
        )
    _, m, n = feats.shape
    if rets.shape != (config.window, m):
        raise DataError(f"returns shape {rets.shape} != ({config.window}, {m})")
    if theta0 is not None:
        if theta0.shape != (m, n + 2):
            raise DataError(f"theta0 shape {theta0.shape} != ({m}, {n + 2})")
        theta = np.array(theta0, dtype=np.float64)
    else:
        rng = np.random.default_rng(config.seed)
        theta = rng.standard_normal((m, n + 2))
    f_init = np.zeros(m)
    log: list[float] = []
    traj: Trajectory | None = None
    degenerate = False
    for epoch in range(1, config.max_epochs + 1):
        traj = sweep(
            theta,
            feats[1:],
            rets[1:],
            f_init,
            config.cost_rate,
            config.gradient_mode,
            with_grads=True,
        )
        s = sharpe(traj.profits)
        log.append(s.value)
        if s.degenerate or not np.isfinite(s.value):
            degenerate = True
            if epoch == 1:
                warnings.warn(
                    "train: degenerate returns on epoch 1, returning initial theta",
                    RuntimeWarning,
                )
            break
        if epoch >= 2 and abs(log[-1] - log[-2]) <= config.epsilon:
            break
        if epoch == config.max_epochs:
            break
        grad = sharpe_total_gradient(traj)
        theta = update_params(theta, grad, config.learning_rate, config.l2)
    assert traj is not None
    return TrainResult(
        theta=theta,
        sharpe_log=log,
        final_weights=traj.weights[-1].copy(),
        degenerate=degenerate,
    )


def evaluate(
    theta: np.ndarray,
    features: np.ndarray,
    returns: np.ndarray,
    f_init: np.ndarray,
    cost_rate: float,
) -> Trajectory:
    """Apply trained parameters over a test window; no updates, no grads."""
    return sweep(
        theta,
        features,
        returns,
        f_init,
        cost_rate,
        mode="collapsed",
        with_grads=False,
    )
