"""Kernel SVM trained by sequential minimal optimization.

Binary subproblems solve the standard dual with box constraint C
(the "complexity" hyperparameter) and a KKT violation tolerance of 1e-3,
updating one alpha pair per step with the classic clipping rules.
Multiclass is one-vs-rest on the decision values.
"""

import numpy as np

KKT_TOL = 1e-3
MAX_PASSES = 40


def kernel_matrix(kind, A, B, gamma, coef0, degree):
    if kind == "rbf":
        aa = np.sum(A * A, axis=1)[:, None]
        bb = np.sum(B * B, axis=1)[None, :]
        d2 = np.maximum(aa + bb - 2.0 * (A @ B.T), 0.0)
        return np.exp(-gamma * d2)
    if kind == "poly":
        return (gamma * (A @ B.T) + coef0) ** degree
    raise ValueError("unknown kernel %r" % kind)


class _BinarySMO:
    def __init__(self, C, kind, gamma, coef0, degree, seed):
        self.C = float(C)
        self.kind = kind
        self.gamma = float(gamma)
        self.coef0 = float(coef0)
        self.degree = int(degree)
        self.seed = int(seed)
        self.alpha = None
        self.b = 0.0
        self.sv_X = None
        self.sv_t = None

    def fit(self, X, t):
        n = X.shape[0]
        K = kernel_matrix(self.kind, X, X, self.gamma, self.coef0, self.degree)
        alpha = np.zeros(n)
        b = 0.0
        rng = np.random.default_rng(self.seed)

        def f(i):
            return float(np.dot(alpha * t, K[:, i])) + b

        passes = 0
        while passes < MAX_PASSES:
            changed = 0
            for i in range(n):
                Ei = f(i) - t[i]
                if ((t[i] * Ei < -KKT_TOL and alpha[i] < self.C)
                        or (t[i] * Ei > KKT_TOL and alpha[i] > 0.0)):
                    j = int(rng.integers(n - 1))
                    if j >= i:
                        j += 1
                    Ej = f(j) - t[j]
                    ai_old, aj_old = alpha[i], alpha[j]
                    if t[i] != t[j]:
                        L = max(0.0, aj_old - ai_old)
                        H = min(self.C, self.C + aj_old - ai_old)
                    else:
                        L = max(0.0, ai_old + aj_old - self.C)
                        H = min(self.C, ai_old + aj_old)
                    if L >= H:
                        continue
                    eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
                    if eta >= 0.0:
                        continue
                    aj = aj_old - t[j] * (Ei - Ej) / eta
                    aj = min(max(aj, L), H)
                    if abs(aj - aj_old) < 1e-7 * (aj + aj_old + 1e-7):
                        continue
                    ai = ai_old + t[i] * t[j] * (aj_old - aj)
                    b1 = (b - Ei - t[i] * (ai - ai_old) * K[i, i]
                          - t[j] * (aj - aj_old) * K[i, j])
                    b2 = (b - Ej - t[i] * (ai - ai_old) * K[i, j]
                          - t[j] * (aj - aj_old) * K[j, j])
                    if 0.0 < ai < self.C:
                        b = b1
                    elif 0.0 < aj < self.C:
                        b = b2
                    else:
                        b = 0.5 * (b1 + b2)
                    alpha[i], alpha[j] = ai, aj
                    changed += 1
            if changed == 0:
                break
            passes += 1

        keep = alpha > 1e-12
        self.alpha = alpha[keep]
        self.sv_t = t[keep]
        self.sv_X = X[keep]
        self.b = float(b)
        return self

    def decision(self, X):
        if self.sv_X is None or len(self.alpha) == 0:
            return np.full(X.shape[0], self.b)
        K = kernel_matrix(self.kind, X, self.sv_X, self.gamma, self.coef0,
                          self.degree)
        return K @ (self.alpha * self.sv_t) + self.b

    def state(self):
        return {
            "alpha": self.alpha.tolist(), "b": self.b,
            "sv_X": self.sv_X.tolist(), "sv_t": self.sv_t.tolist(),
        }

    def load(self, d):
        self.alpha = np.asarray(d["alpha"], dtype=np.float64)
        self.b = float(d["b"])
        self.sv_X = np.asarray(d["sv_X"], dtype=np.float64)
        if self.sv_X.ndim == 1:
            self.sv_X = self.sv_X.reshape(0, 0) if self.sv_X.size == 0 else self.sv_X
        self.sv_t = np.asarray(d["sv_t"], dtype=np.float64)


class SVMClassifier:
    def __init__(self, complexity=1.0, kernel="rbf", coef0=0.0, gamma=0.1,
                 degree=3, seed=0):
        self.complexity = float(complexity)
        self.kernel = kernel
        self.coef0 = float(coef0)
        self.gamma = float(gamma)
        self.degree = int(degree)
        self.seed = int(seed)
        self.machines = []
        self.n_classes = 0

    def _make(self, k):
        return _BinarySMO(self.complexity, self.kernel, self.gamma,
                          self.coef0, self.degree, seed=self.seed + k)

    def fit(self, X, y, n_classes, sample_weight=None):
        if sample_weight is not None and not np.allclose(sample_weight,
                                                         sample_weight[0]):
            raise ValueError("sample weights are not supported here")
        self.n_classes = int(n_classes)
        self.machines = []
        n_models = 1 if self.n_classes == 2 else self.n_classes
        for k in range(n_models):
            pos = 1 if self.n_classes == 2 else k
            t = np.where(y == pos, 1.0, -1.0)
            self.machines.append(self._make(k).fit(X, t))
        return self

    def decision(self, X):
        if self.n_classes == 2:
            f = self.machines[0].decision(X)
            return np.column_stack([-f, f])
        return np.column_stack([m.decision(X) for m in self.machines])

    def predict(self, X):
        return np.argmax(self.decision(X), axis=1).astype(np.int64)

    def state(self):
        return {
            "complexity": self.complexity, "kernel": self.kernel,
            "coef0": self.coef0, "gamma": self.gamma, "degree": self.degree,
            "seed": self.seed, "n_classes": self.n_classes,
            "machines": [m.state() for m in self.machines],
        }

    @classmethod
    def from_state(cls, d):
        obj = cls(complexity=d["complexity"], kernel=d["kernel"],
                  coef0=d["coef0"], gamma=d["gamma"], degree=d["degree"],
                  seed=d["seed"])
        obj.n_classes = d["n_classes"]
        obj.machines = []
        for k, ms in enumerate(d["machines"]):
            m = obj._make(k)
            m.load(ms)
            obj.machines.append(m)
        return obj
