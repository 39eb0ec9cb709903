"""Monte-Carlo checks of the random-embedding bounds.

* mean variation: ``E|f(clip(A_p y)) - f(clip(A_q y))| <= sqrt(8) L ||y||``
* matrix norm:    ``E||A_p - A_q||_2 <= sqrt(8/n) sqrt(max(n, d))``
* distance preservation: ``||A y_i - A y_j|| <= sqrt(1 + eps) ||y_i - y_j||``

A bound report passes when the empirical mean minus three standard errors
does not exceed the theoretical bound.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .embedding import _matvec, clip_to_unit_box
from .spaces import RngStream, l2_norm

POWER_TOL = 1e-6
POWER_MAX_ITER = 10_000
MC_BATCH = 256


@dataclass(frozen=True)
class BoundReport:
    name: str
    empirical_mean: float
    bound: float
    trials: int
    standard_error: float
    passed: bool
    note: str = ""

    @classmethod
    def from_samples(cls, name: str, samples: np.ndarray, bound: float, note: str = "",
                     converged: bool = True) -> "BoundReport":
        samples = np.asarray(samples, dtype=np.float64)
        mean = float(samples.mean())
        se = float(samples.std(ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
        passed = converged and mean - 3.0 * se <= bound
        return cls(name, mean, float(bound), int(samples.size), se, passed, note)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (f"[{status}] {self.name}: mean={self.empirical_mean:.6g} "
                f"se={self.standard_error:.3g} bound={self.bound:.6g} trials={self.trials}")
        return text + (f"  ({self.note})" if self.note else "")


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    fields = ["name", "empirical_mean", "bound", "trials", "standard_error", "passed", "note"]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(asdict(r))
    return buf.getvalue()


def _matrices(gen: np.random.Generator, count: int, n: int, d: int) -> np.ndarray:
    return gen.standard_normal((count, n, d)) / math.sqrt(n)


def theorem1_check(f, L: float, y, trials: int = 10_000, seed: int = 0,
                   n: int | None = None, estimated: bool = False) -> BoundReport:
    """Mean absolute gap between two independent embeddings of the same ``y``."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    n = f.n if n is None else n
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    d = y.size
    stream = RngStream.for_purpose(seed, "theorem1", n, d)
    gaps = np.empty(trials)
    done = 0
    batch = 0
    while done < trials:
        m = min(MC_BATCH, trials - done)
        gen = stream.generator(batch)
        ap = _matrices(gen, m, n, d)
        aq = _matrices(gen, m, n, d)
        for k in range(m):
            gp = f(clip_to_unit_box(_matvec(ap[k], y)))
            gq = f(clip_to_unit_box(_matvec(aq[k], y)))
            gaps[done + k] = abs(gp - gq)
        done += m
        batch += 1
    note = "L is an empirical lower bound; pass is indicative only" if estimated else ""
    return BoundReport.from_samples(f"theorem1 |y|={l2_norm(y):.4g} n={n} d={d}",
                                    gaps, math.sqrt(8.0) * L * l2_norm(y), note)


def spectral_norms(mats: np.ndarray, tol: float = POWER_TOL,
                   max_iter: int = POWER_MAX_ITER, seed: int = 0) -> tuple[np.ndarray, bool]:
    """Largest singular value of each matrix in a ``(batch, n, d)`` stack.

    Power iteration on the ``d x d`` Gram matrices, stopped once every
    Rayleigh quotient changes by at most ``tol`` relative. Returns the norms
    and whether all of them converged within ``max_iter`` steps.
    """
    gram = np.einsum("bij,bik->bjk", mats, mats)
    b, d, _ = gram.shape
    v = np.random.default_rng(seed).standard_normal((b, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    lam = np.einsum("bi,bij,bj->b", v, gram, v)
    active = np.ones(b, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        w = np.einsum("bij,bj->bi", gram[active], v[active])
        norms = np.linalg.norm(w, axis=1)
        zero = norms == 0.0
        norms[zero] = 1.0
        w /= norms[:, None]
        new = np.einsum("bi,bij,bj->b", w, gram[active], w)
        new[zero] = 0.0
        done = np.abs(new - lam[active]) <= tol * np.maximum(np.abs(new), 1e-300)
        idx = np.flatnonzero(active)
        v[idx] = w
        lam[idx] = new
        active[idx[done]] = False
    return np.sqrt(np.maximum(lam, 0.0)), not active.any()


def matrix_norm_check(n: int, d: int, trials: int = 200, seed: int = 0) -> BoundReport:
    """Expected spectral norm of the difference of two independent N(0, 1/n) matrices."""
    if trials < 30:
        raise ValueError("need at least 30 trials")
    stream = RngStream.for_purpose(seed, "matrix_norm", n, d)
    per_batch = max(1, min(trials, 2**22 // (n * d)))
    out = []
    converged = True
    for batch in range(-(-trials // per_batch)):
        m = min(per_batch, trials - batch * per_batch)
        gen = stream.generator(batch)
        diff = _matrices(gen, m, n, d) - _matrices(gen, m, n, d)
        norms, ok = spectral_norms(diff, seed=batch)
        converged &= ok
        out.append(norms)
    note = "" if converged else f"power iteration did not converge in {POWER_MAX_ITER} steps"
    bound = math.sqrt(8.0 / n) * math.sqrt(max(n, d))
    return BoundReport.from_samples(f"matrix_norm n={n} d={d}", np.concatenate(out), bound,
                                    note, converged)


def jl_required_dim(m: int, eps: float) -> float:
    """Smallest admissible ``n`` is anything above ``9 ln m / (eps^2 - eps^3)``."""
    return 9.0 * math.log(m) / (eps ** 2 - eps ** 3)


def jl_check(points, n: int, eps: float, trials: int = 1000, seed: int = 0) -> float:
    """Fraction of trials in which one matrix keeps every pairwise distance within ``sqrt(1+eps)``."""
    if not 0.0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    m, d = pts.shape
    if m > 1 and n <= jl_required_dim(m, eps):
        warnings.warn(f"n={n} does not exceed 9 ln m / (eps^2 - eps^3) = "
                      f"{jl_required_dim(m, eps):.1f}", stacklevel=2)
    if m < 2:
        return 1.0
    ii, jj = np.triu_indices(m, 1)
    low = np.linalg.norm(pts[ii] - pts[jj], axis=1)
    limit = math.sqrt(1.0 + eps) * low
    stream = RngStream.for_purpose(seed, "jl", n, d, m)
    ok = 0
    for t in range(trials):
        a = _matrices(stream.generator(t), 1, n, d)[0]
        high = pts @ a.T
        dist = np.linalg.norm(high[ii] - high[jj], axis=1)
        ok += bool(np.all(dist <= limit))
    return ok / trials
