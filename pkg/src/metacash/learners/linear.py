"""Linear classifiers: batch logistic regression and an SGD family.

Logistic regression minimizes  penalty(w) + C * sum_i log(1 + exp(-t_i f_i))
with an unpenalized intercept, solved by FISTA (proximal soft-threshold for
l1, plain gradient for l2) with a Lipschitz step from a power-iteration
bound.  Tiny C therefore means maximal regularization and near-zero
weights.

The SGD classifier minimizes  mean_i loss_i + alpha * penalty  by per-sample
subgradient steps under one of three schedules: const (eta0), invscaling
(eta0 / t^0.5), and opt (1 / (alpha * (t0 + t)) with t0 = 1/alpha, which
ignores eta0).  alpha is fixed at 1e-4.  Multiclass is one-vs-rest for
both, ranked by decision value.
"""

import numpy as np

SGD_ALPHA = 1e-4
SGD_EPOCHS = 30


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -30.0, 30.0)))


def _spectral_norm_sq(X, iters=30):
    """Upper estimate of the largest eigenvalue of X^T X."""
    p = X.shape[1]
    if p == 0:
        return 1.0
    v = np.full(p, 1.0 / np.sqrt(p))
    lam = 1.0
    for _ in range(iters):
        u = X.T @ (X @ v)
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            return 1.0
        lam = norm
        v = u / norm
    return lam * 1.01


def _fista_logistic(X, t, C, penalty, max_iter=500, tol=1e-9):
    """Binary solve; X already carries the intercept column last when one
    is wanted (that coefficient is never penalized)."""
    n, p = X.shape
    has_icpt = penalty.endswith("+icpt")
    pen = penalty.split("+")[0]
    pen_mask = np.ones(p)
    if has_icpt:
        pen_mask[-1] = 0.0

    lip = 0.25 * C * _spectral_norm_sq(X) + (1.0 if pen == "l2" else 0.0)
    step = 1.0 / max(lip, 1e-12)
    w = np.zeros(p)
    z = w.copy()
    theta = 1.0
    for _ in range(max_iter):
        m = X @ z
        sig = _sigmoid(-t * m)
        grad = C * (X.T @ (-t * sig))
        if pen == "l2":
            grad = grad + pen_mask * z
            w_new = z - step * grad
        else:
            w_new = z - step * grad
            thresh = step * pen_mask
            w_new = np.sign(w_new) * np.maximum(np.abs(w_new) - thresh, 0.0)
        theta_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * theta * theta))
        z = w_new + ((theta - 1.0) / theta_new) * (w_new - w)
        delta = float(np.max(np.abs(w_new - w))) if p else 0.0
        w, theta = w_new, theta_new
        if delta < tol:
            break
    return w


class LogisticRegression:
    def __init__(self, C=1.0, penalty="l2", fit_intercept=True, seed=0):
        self.C = float(C)
        self.penalty = penalty
        self.fit_intercept = bool(fit_intercept)
        self.seed = int(seed)
        self.coef = None       # (n_models, p)
        self.intercept = None  # (n_models,)
        self.n_classes = 0

    def _design(self, X):
        if self.fit_intercept:
            return np.column_stack([X, np.ones(X.shape[0])])
        return X

    def fit(self, X, y, n_classes, sample_weight=None):
        if sample_weight is not None and not np.allclose(sample_weight,
                                                         sample_weight[0]):
            raise ValueError("sample weights are not supported here")
        self.n_classes = int(n_classes)
        Xd = self._design(X)
        pen = self.penalty + ("+icpt" if self.fit_intercept else "")
        n_models = 1 if self.n_classes == 2 else self.n_classes
        coefs, icpts = [], []
        for k in range(n_models):
            pos = 1 if self.n_classes == 2 else k
            t = np.where(y == pos, 1.0, -1.0)
            w = _fista_logistic(Xd, t, self.C, pen)
            if self.fit_intercept:
                coefs.append(w[:-1])
                icpts.append(w[-1])
            else:
                coefs.append(w)
                icpts.append(0.0)
        self.coef = np.vstack(coefs)
        self.intercept = np.asarray(icpts)
        return self

    def decision(self, X):
        # weights near the divergence guard can be huge; clamp the scores
        # instead of letting the product overflow to inf
        with np.errstate(over="ignore"):
            f = X @ self.coef.T + self.intercept
        f = np.clip(f, -1e300, 1e300)
        if self.n_classes == 2:
            return np.column_stack([-f[:, 0], f[:, 0]])
        return f

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1).astype(np.int64)

    def predict_proba(self, X):
        d = self.decision(X)
        if self.n_classes == 2:
            p1 = _sigmoid(d[:, 1])
            return np.column_stack([1.0 - p1, p1])
        p = _sigmoid(d)
        tot = p.sum(axis=1, keepdims=True)
        tot[tot == 0.0] = 1.0
        return p / tot

    def state(self):
        return {
            "C": self.C, "penalty": self.penalty,
            "fit_intercept": self.fit_intercept, "seed": self.seed,
            "n_classes": self.n_classes,
            "coef": self.coef.tolist(), "intercept": self.intercept.tolist(),
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(C=d["C"], penalty=d["penalty"],
                  fit_intercept=d["fit_intercept"], seed=d["seed"])
        obj.n_classes = d["n_classes"]
        obj.coef = np.asarray(d["coef"], dtype=np.float64)
        obj.intercept = np.asarray(d["intercept"], dtype=np.float64)
        return obj


def _loss_grad(loss, margin):
    """d loss / d f as a function of margin m = t * f (returns factor g so
    that gradient wrt f is g * t)."""
    if loss == "hinge":
        return -1.0 if margin < 1.0 else 0.0
    if loss == "squared_hinge":
        return -2.0 * (1.0 - margin) if margin < 1.0 else 0.0
    if loss == "perceptron":
        return -1.0 if margin <= 0.0 else 0.0
    if loss == "log":
        return -_sigmoid(-margin)
    raise ValueError("unknown loss %r" % loss)


class SGDClassifier:
    def __init__(self, loss="hinge", penalty="l2", learning_rate="opt",
                 fit_intercept=True, l1_ratio=0.15, eta0=0.01, seed=0):
        self.loss = loss
        self.penalty = penalty
        self.learning_rate = learning_rate
        self.fit_intercept = bool(fit_intercept)
        self.l1_ratio = float(l1_ratio)
        self.eta0 = float(eta0)
        self.seed = int(seed)
        self.coef = None
        self.intercept = None
        self.n_classes = 0

    def _eta(self, t):
        if self.learning_rate == "const":
            return self.eta0
        if self.learning_rate == "invscaling":
            return self.eta0 / np.sqrt(t)
        if self.learning_rate == "opt":
            t0 = 1.0 / SGD_ALPHA
            return 1.0 / (SGD_ALPHA * (t0 + t))
        raise ValueError("unknown schedule %r" % self.learning_rate)

    def _penalty_grad(self, w):
        if self.penalty == "l2":
            return w
        if self.penalty == "l1":
            return np.sign(w)
        return (self.l1_ratio * np.sign(w)
                + (1.0 - self.l1_ratio) * w)

    def _fit_binary(self, X, t, rng):
        n, p = X.shape
        w = np.zeros(p)
        b = 0.0
        step_count = 1
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(SGD_EPOCHS):
                w_prev, b_prev = w, b
                order = rng.permutation(n)
                for i in order:
                    eta = self._eta(step_count)
                    step_count += 1
                    f = float(X[i] @ w) + b
                    g = _loss_grad(self.loss, t[i] * f)
                    grad_w = g * t[i] * X[i] + SGD_ALPHA * self._penalty_grad(w)
                    w = w - eta * grad_w
                    if self.fit_intercept:
                        b = b - eta * g * t[i]
                if not (np.all(np.isfinite(w)) and np.isfinite(b)):
                    # a too-hot learning rate diverged; keep the last
                    # finite epoch instead of emitting NaN coefficients
                    return w_prev, b_prev
        return w, b

    def fit(self, X, y, n_classes, sample_weight=None):
        if sample_weight is not None and not np.allclose(sample_weight,
                                                         sample_weight[0]):
            raise ValueError("sample weights are not supported here")
        self.n_classes = int(n_classes)
        n_models = 1 if self.n_classes == 2 else self.n_classes
        coefs, icpts = [], []
        for k in range(n_models):
            pos = 1 if self.n_classes == 2 else k
            t = np.where(y == pos, 1.0, -1.0)
            rng = np.random.default_rng([self.seed, k])
            w, b = self._fit_binary(X, t, rng)
            coefs.append(w)
            icpts.append(b)
        self.coef = np.vstack(coefs)
        self.intercept = np.asarray(icpts)
        return self

    def decision(self, X):
        # weights near the divergence guard can be huge; clamp the scores
        # instead of letting the product overflow to inf
        with np.errstate(over="ignore"):
            f = X @ self.coef.T + self.intercept
        f = np.clip(f, -1e300, 1e300)
        if self.n_classes == 2:
            return np.column_stack([-f[:, 0], f[:, 0]])
        return f

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1).astype(np.int64)

    def state(self):
        return {
            "loss": self.loss, "penalty": self.penalty,
            "learning_rate": self.learning_rate,
            "fit_intercept": self.fit_intercept,
            "l1_ratio": self.l1_ratio, "eta0": self.eta0, "seed": self.seed,
            "n_classes": self.n_classes,
            "coef": self.coef.tolist(), "intercept": self.intercept.tolist(),
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(loss=d["loss"], penalty=d["penalty"],
                  learning_rate=d["learning_rate"],
                  fit_intercept=d["fit_intercept"], l1_ratio=d["l1_ratio"],
                  eta0=d["eta0"], seed=d["seed"])
        obj.n_classes = d["n_classes"]
        obj.coef = np.asarray(d["coef"], dtype=np.float64)
        obj.intercept = np.asarray(d["intercept"], dtype=np.float64)
        return obj
