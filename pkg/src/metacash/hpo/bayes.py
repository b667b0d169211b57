"""Bayesian optimization with a Gaussian-process surrogate.

The surrogate is a squared-exponential kernel with one length scale per
encoded input dimension, hyperparameters chosen by maximizing the
marginal likelihood from several starts.  Numeric dimensions enter the
GP normalized to [0, 1] (log dimensions in log space), categorical
dimensions as one-hot blocks, and inactive conditional dimensions as -1
(numeric) or an all-zero block (categorical).  The next point is the
expected-improvement argmax over a random candidate pool plus local
perturbations of the incumbent; if every observed score is identical
the surrogate has nothing to rank with and that step falls back to a
random draw (counted in the result notes).
"""

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize
from scipy.special import ndtr

from ..learners.spaces import CAT
from .result import SearchError, SearchResult

N_CANDIDATES = 1000
N_LOCAL = 20
PERTURB_SCALE = 0.1

_BOUND_SF2 = (np.log(1e-6), np.log(1e6))
_BOUND_LS = (np.log(1e-3), np.log(1e3))
_BOUND_SN2 = (np.log(1e-8), np.log(10.0))


class SpaceEncoder:
    """Fixed-width numeric embedding of configurations."""

    def __init__(self, space):
        self.space = space
        self.n_out = sum(len(d.choices) if d.kind == CAT else 1
                         for d in space.dimensions)

    def encode(self, cfg):
        out = np.empty(self.n_out)
        j = 0
        for d in self.space.dimensions:
            if d.kind == CAT:
                width = len(d.choices)
                block = np.zeros(width)
                if d.name in cfg:
                    block[d.choices.index(cfg[d.name])] = 1.0
                out[j:j + width] = block
                j += width
                continue
            if d.name not in cfg:
                out[j] = -1.0
            elif d.low == d.high:
                out[j] = 0.5
            elif d.log:
                out[j] = ((np.log(cfg[d.name]) - np.log(d.low))
                          / (np.log(d.high) - np.log(d.low)))
            else:
                out[j] = (cfg[d.name] - d.low) / (d.high - d.low)
            j += 1
        return out

    def encode_many(self, cfgs):
        return np.array([self.encode(c) for c in cfgs])


def _per_dim_sqdist(A, B):
    """(d, nA, nB) array of squared distances along each input dimension."""
    diff = A[:, None, :] - B[None, :, :]
    return np.moveaxis(diff * diff, 2, 0)


class Surrogate:
    """Gaussian process regressor with explicit hyperparameters.

    ``posterior`` returns the latent mean and variance (observation
    noise excluded from the variance)."""

    def __init__(self, signal_var, length_scales, noise_var):
        self.signal_var = float(signal_var)
        self.length_scales = np.asarray(length_scales, dtype=np.float64)
        self.noise_var = float(noise_var)
        self.X = None
        self.L = None
        self.alpha = None

    def kernel(self, A, B):
        S = _per_dim_sqdist(A, B)
        D = np.tensordot(1.0 / self.length_scales ** 2, S, axes=1)
        return self.signal_var * np.exp(-0.5 * D)

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        K = self.kernel(X, X) + self.noise_var * np.eye(len(X))
        self.L = cholesky(K, lower=True)
        self.alpha = cho_solve((self.L, True), y)
        self.X = X
        return self

    def posterior(self, Q):
        Q = np.asarray(Q, dtype=np.float64)
        Ks = self.kernel(self.X, Q)
        mean = Ks.T @ self.alpha
        V = solve_triangular(self.L, Ks, lower=True)
        var = np.clip(self.signal_var - np.sum(V * V, axis=0), 0.0, None)
        return mean, var

    def log_marginal_likelihood(self, y):
        y = np.asarray(y, dtype=np.float64)
        return float(-0.5 * y @ self.alpha
                     - np.sum(np.log(np.diag(self.L)))
                     - 0.5 * len(y) * np.log(2.0 * np.pi))

    @classmethod
    def fit_mle(cls, X, y, rng, n_starts=3, maxiter=50):
        """Hyperparameters by multi-start bounded marginal-likelihood
        maximization."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        S = _per_dim_sqdist(X, X)
        eye = np.eye(n)

        def negative_lml(theta):
            sf2 = np.exp(theta[0])
            ls2 = np.exp(2.0 * theta[1:1 + d])
            sn2 = np.exp(theta[-1])
            D = np.tensordot(1.0 / ls2, S, axes=1)
            K_se = sf2 * np.exp(-0.5 * D)
            try:
                L = cholesky(K_se + sn2 * eye, lower=True)
            except np.linalg.LinAlgError:
                return 1e25, np.zeros_like(theta)
            alpha = cho_solve((L, True), y)
            lml = (-0.5 * y @ alpha - np.sum(np.log(np.diag(L)))
                   - 0.5 * n * np.log(2.0 * np.pi))
            # d lml / d theta_j = 0.5 tr((alpha alpha^T - K^-1) dK/dtheta_j)
            Kinv = cho_solve((L, True), eye)
            A = np.outer(alpha, alpha) - Kinv
            grad = np.empty_like(theta)
            grad[0] = 0.5 * np.sum(A * K_se)
            for j in range(d):
                grad[1 + j] = 0.5 * np.sum(A * (K_se * (S[j] / ls2[j])))
            grad[-1] = 0.5 * sn2 * np.trace(A)
            return -lml, -grad

        bounds = [_BOUND_SF2] + [_BOUND_LS] * d + [_BOUND_SN2]
        base = np.r_[np.log(max(y.var(), 1e-3)),
                     np.full(d, np.log(0.5)), np.log(1e-4)]
        best_theta, best_val = base, negative_lml(base)[0]
        starts = [base]
        for _ in range(n_starts - 1):
            starts.append(base + rng.normal(scale=1.0, size=len(base)))
        for theta0 in starts:
            theta0 = np.clip(theta0, [b[0] for b in bounds],
                             [b[1] for b in bounds])
            res = minimize(negative_lml, theta0, jac=True, method="L-BFGS-B",
                           bounds=bounds, options={"maxiter": maxiter})
            if np.isfinite(res.fun) and res.fun < best_val:
                best_theta, best_val = res.x, res.fun
        sf2 = float(np.exp(best_theta[0]))
        ls = np.exp(best_theta[1:1 + d])
        sn2 = float(np.exp(best_theta[-1]))
        return cls(sf2, ls, sn2).fit(X, y)


def expected_improvement(mean, var, best):
    sd = np.sqrt(var)
    imp = mean - best
    ei = np.where(imp > 0, imp, 0.0)
    pos = sd > 0
    z = np.zeros_like(mean)
    np.divide(imp, sd, out=z, where=pos)
    phi = np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)
    ei = np.where(pos, imp * ndtr(z) + sd * phi, ei)
    return ei


def _jitter(dim, value, rng, scale):
    if dim.kind == CAT:
        if rng.random() < 2.0 * scale:
            return dim.sample(rng)
        return value
    if dim.low == dim.high:
        return value
    if dim.kind == "integer":
        span = dim.high - dim.low
        v = int(np.rint(value + rng.normal() * scale * span))
        return int(min(max(v, dim.low), dim.high))
    if dim.log:
        lo, hi = np.log(dim.low), np.log(dim.high)
        v = np.log(value) + rng.normal() * scale * (hi - lo)
        return float(np.exp(min(max(v, lo), hi)))
    span = dim.high - dim.low
    v = value + rng.normal() * scale * span
    return float(min(max(v, dim.low), dim.high))


def perturb_config(space, cfg, rng, scale=PERTURB_SCALE):
    """A valid neighbor of ``cfg``: numeric genes jittered, categorical
    genes occasionally resampled, newly active dimensions drawn fresh."""
    out = {}
    for d in space.dimensions:
        if not d.condition:
            out[d.name] = (_jitter(d, cfg[d.name], rng, scale)
                           if d.name in cfg else d.sample(rng))
    for d in space.dimensions:
        if d.condition and out.get(d.condition[0]) == d.condition[1]:
            out[d.name] = (_jitter(d, cfg[d.name], rng, scale)
                           if d.name in cfg else d.sample(rng))
    return out


def bayes_opt(space, objective, budget, init=5, seed=0):
    if init < 2:
        raise SearchError("init must be >= 2")
    if budget <= init:
        raise SearchError("budget must exceed the warmup count")

    rng = np.random.default_rng(seed)
    encoder = SpaceEncoder(space)
    history = []
    configs = []
    scores = []
    degenerate = 0

    def evaluate(cfg):
        score = float(objective(cfg))
        history.append((cfg, score))
        configs.append(cfg)
        scores.append(score)

    for _ in range(init):
        evaluate(space.sample(rng))

    for _ in range(budget - init):
        y = np.asarray(scores)
        if np.ptp(y) == 0.0:
            degenerate += 1
            evaluate(space.sample(rng))
            continue
        X = encoder.encode_many(configs)
        mu, sd = y.mean(), y.std()
        surrogate = Surrogate.fit_mle(X, (y - mu) / sd, rng)
        incumbent = configs[int(np.argmax(y))]
        candidates = [space.sample(rng) for _ in range(N_CANDIDATES)]
        candidates += [perturb_config(space, incumbent, rng)
                       for _ in range(N_LOCAL)]
        mean, var = surrogate.posterior(encoder.encode_many(candidates))
        ei = expected_improvement(mean, var, (y.max() - mu) / sd)
        evaluate(candidates[int(np.argmax(ei))])

    best = int(np.argmax([s for _, s in history]))
    best_cfg, best_score = history[best]
    notes = {"degenerate_steps": degenerate} if degenerate else {}
    return SearchResult(strategy="bayes", best_config=best_cfg,
                        best_score=best_score, history=history,
                        evaluations_used=len(history), seed=int(seed),
                        notes=notes)
