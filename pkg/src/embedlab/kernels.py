"""Negative-definite kernel certification, snowflake transforms, and
embeddings of finite negative-type data into Euclidean space.

A symmetric kernel K is negative definite when its quadratic form is
nonpositive on mean-zero coefficient vectors; projecting with
P = I - ones/n reduces the test to the extreme eigenvalue of P K P. A
zero-diagonal negative-definite kernel is realized as squared Euclidean
distances via the centered Gram factorization G = -(1/2) P K P, and
exp(-K) is then positive semidefinite (the classical correspondence,
asserted in tests rather than assumed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric_core import (
    ModulusProfile,
    SampledMap,
    compression_moduli,
    extract_net,
    lr_dist,
    uniform_bins,
)

__all__ = [
    "KernelMatrix",
    "EmbeddingResult",
    "is_negative_definite",
    "snowflake_kernel",
    "schoenberg_embed",
    "exp_positive_definite_check",
    "holder_solvent_transform",
    "squared_distance_kernel",
]

DEFAULT_TOL = 1e-9


@dataclass
class KernelMatrix:
    """Symmetric kernel values with a designated candidate kind.

    Symmetry is exact by construction: entries are rebuilt from the upper
    triangle, so K[i, j] and K[j, i] are the same float.
    """

    entries: np.ndarray
    kind: str = "candidate-negative-definite"
    zero_diagonal: bool = False

    def __post_init__(self):
        K = np.asarray(self.entries, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError("kernel must be square")
        upper = np.triu(K)
        self.entries = upper + np.triu(K, k=1).T
        if self.zero_diagonal:
            if np.abs(np.diag(self.entries)).max(initial=0.0) != 0.0:
                raise ValueError("zero_diagonal kernel carries nonzero diagonal entries")
        if self.kind not in ("candidate-negative-definite", "candidate-positive-definite"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def scale(self) -> float:
        return float(np.abs(self.entries).max(initial=0.0))

    def to_json(self) -> dict:
        iu, ju = np.triu_indices(self.n)
        return {
            "size": self.n,
            "kind": self.kind,
            "zero_diagonal": self.zero_diagonal,
            "upper": self.entries[iu, ju].tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KernelMatrix":
        allowed = {"size", "kind", "zero_diagonal", "upper"}
        if set(obj) - allowed:
            raise ValueError(f"unknown kernel fields {sorted(set(obj) - allowed)}")
        n = int(obj["size"])
        packed = np.asarray(obj["upper"], dtype=float)
        if len(packed) != n * (n + 1) // 2:
            raise ValueError("packed upper triangle has the wrong length")
        K = np.zeros((n, n))
        iu, ju = np.triu_indices(n)
        K[iu, ju] = packed
        return cls(K, obj.get("kind", "candidate-negative-definite"), bool(obj.get("zero_diagonal", False)))


def squared_distance_kernel(points) -> KernelMatrix:
    """K(i, j) = squared Euclidean distance between points i and j."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = pts[:, None, :] - pts[None, :, :]
    K = (diff**2).sum(axis=2)
    np.fill_diagonal(K, 0.0)
    return KernelMatrix(K, "candidate-negative-definite", zero_diagonal=True)


def _centered(K: np.ndarray) -> np.ndarray:
    n = K.shape[0]
    P = np.eye(n) - np.ones((n, n)) / n
    M = P @ K @ P
    return (M + M.T) / 2.0


def is_negative_definite(K: KernelMatrix, tol: float = DEFAULT_TOL) -> dict:
    """Extreme-eigenvalue test of the mean-zero quadratic form.

    max_violation is the largest eigenvalue of P K P; the verdict allows it
    up to tol * max|entry|.
    """
    evals = np.linalg.eigvalsh(_centered(K.entries))
    max_eig = float(evals[-1])
    return {
        "verdict": bool(max_eig <= tol * max(K.scale, 1e-300)),
        "max_violation": max_eig,
        "scale": K.scale,
        "tol": tol,
    }


def snowflake_kernel(K: KernelMatrix, alpha: float, tol: float = DEFAULT_TOL) -> KernelMatrix:
    """Entry-wise K^alpha for alpha in (0,1); preserves negative definiteness.

    The result is re-certified before being returned: floating-point
    negative-type data is never exactly semidefinite, so the certificate is
    part of the contract rather than an assumption.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if (K.entries < 0).any():
        raise ValueError("not a squared-distance kernel: negative entries")
    check = is_negative_definite(K, tol)
    if not check["verdict"]:
        raise ValueError(f"input kernel is not negative definite (violation {check['max_violation']:.3e})")
    flaked = KernelMatrix(K.entries**alpha, "candidate-negative-definite", K.zero_diagonal)
    recheck = is_negative_definite(flaked, tol)
    if not recheck["verdict"]:
        raise ValueError(
            f"snowflake certification failed beyond tolerance (violation {recheck['max_violation']:.3e})"
        )
    return flaked


@dataclass
class EmbeddingResult:
    """Euclidean realization of a negative-type kernel.

    reconstruction_error is the maximum over pairs of
    | ||g_i - g_j||^2 - K(i,j) | and is always reported.
    """

    points: np.ndarray
    reconstruction_error: float
    clipped_eigenvalues: int

    def to_json(self) -> dict:
        return {
            "points": self.points.tolist(),
            "reconstruction_error": self.reconstruction_error,
            "clipped_eigenvalues": self.clipped_eigenvalues,
        }


def schoenberg_embed(K: KernelMatrix, tol: float = DEFAULT_TOL) -> EmbeddingResult:
    """Realize a zero-diagonal negative-definite kernel as squared Euclidean
    distances via the spectral factorization of G = -(1/2) P K P.

    Eigenvalues inside [-tol*scale, 0) are clipped to zero (their count is
    reported); anything below that band means the data is not of negative
    type. The embedding is translation-centered and has dimension <= n-1.
    """
    if not K.zero_diagonal and np.abs(np.diag(K.entries)).max(initial=0.0) != 0.0:
        raise ValueError("embedding needs a zero-diagonal kernel")
    check = is_negative_definite(K, tol)
    if not check["verdict"]:
        raise ValueError(f"not negative type (violation {check['max_violation']:.3e})")
    G = -0.5 * _centered(K.entries)
    evals, evecs = np.linalg.eigh(G)
    scale = max(K.scale, 1e-300)
    if evals[0] < -tol * scale:
        raise ValueError(f"not negative type (Gram eigenvalue {evals[0]:.3e})")
    clipped = int(((evals < 0) & (evals >= -tol * scale)).sum())
    keep = evals > 0
    coords = evecs[:, keep] * np.sqrt(evals[keep])
    if coords.shape[1] > K.n - 1:
        order = np.argsort(evals[keep])
        coords = coords[:, order[1:]]
    diff = coords[:, None, :] - coords[None, :, :]
    sq = (diff**2).sum(axis=2)
    err = float(np.abs(sq - K.entries).max(initial=0.0))
    bound = math.sqrt(tol * scale) + 1e-9
    if err > bound:
        raise ValueError(f"reconstruction error {err:.3e} above the guaranteed bound {bound:.3e}")
    return EmbeddingResult(coords, err, clipped)


def exp_positive_definite_check(g_matrix, tol: float = DEFAULT_TOL) -> dict:
    """Check exp(-g) for positive semidefiniteness, g symmetric >= 0 with
    zero diagonal. The verdict must come out true whenever g certifies
    negative definite (the forward direction only; no claim in reverse)."""
    if isinstance(g_matrix, KernelMatrix):
        g = g_matrix.entries
    else:
        g = np.asarray(g_matrix, dtype=float)
    if (g < 0).any():
        raise ValueError("g must be nonnegative")
    if np.abs(np.diag(g)).max(initial=0.0) != 0.0:
        raise ValueError("g must have zero diagonal")
    F = np.exp(-g)
    F = (F + F.T) / 2.0
    evals = np.linalg.eigvalsh(F)
    min_eig = float(evals[0])
    scale = float(np.abs(F).max())
    return {
        "verdict": bool(min_eig >= -tol * scale),
        "min_eigenvalue": min_eig,
        "scale": scale,
    }


# ---------------------------------------------------------------------------
# the Holder-solvent chain on a sample
# ---------------------------------------------------------------------------

def holder_solvent_transform(
    f: SampledMap,
    alpha: float,
    tol: float = DEFAULT_TOL,
    net_delta: float = None,
    profile: ModulusProfile = None,
):
    """Snowflake the sampled image distances and re-embed them in Euclidean
    space, yielding the alpha-Holder companion sample f_alpha.

    Requires alpha in (0, 1/2) and the large-distance normalization: sampled
    pairs with source distance >= 1 must map no farther than they start.
    When net_delta is given the sample is first restricted to a greedy
    net (the finite stand-in for extending a net restriction). Returns
    (transformed SampledMap, report dict).
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2) for the transform")
    if net_delta is not None:
        from .metric_core import FiniteMetricSpace

        n = len(f)
        D = np.zeros((n, n))
        iu, ju = np.triu_indices(n, k=1)
        sd, _ = f.pair_arrays()
        D[iu, ju] = sd
        D += D.T
        space = FiniteMetricSpace([str(i) for i in range(n)], D)
        f = f.restrict(extract_net(space, net_delta))

    sd, td = f.pair_arrays()
    bad = (sd >= 1.0) & (td > sd)
    if bad.any():
        iu, ju = np.triu_indices(len(f), k=1)
        offenders = [(int(i), int(j)) for i, j in zip(iu[bad], ju[bad])][:20]
        raise ValueError(f"normalization violated: image exceeds source distance on pairs {offenders}")

    n = len(f)
    K = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    K[iu, ju] = td ** (2.0 * alpha)
    K += K.T
    kernel = KernelMatrix(K, "candidate-negative-definite", zero_diagonal=True)
    emb = schoenberg_embed(kernel, tol)

    if profile is None:
        profile = compression_moduli(f, uniform_bins(f))
    image = np.asarray(emb.points, dtype=complex)
    if image.ndim == 1:
        image = image[:, None]
    transformed = SampledMap(
        f.source_points,
        image,
        f.source_dist,
        lambda a, b: lr_dist(a, b, 2.0),
        f.source_kind,
        ("lr", 2.0),
    )
    report = {
        "alpha": alpha,
        "reconstruction_error": emb.reconstruction_error,
        "clipped_eigenvalues": emb.clipped_eigenvalues,
        "profile": profile,
    }
    return transformed, report


def holder_sandwich_check(original: SampledMap, transformed: SampledMap, alpha: float, profile: ModulusProfile, slack: float = 1e-6) -> dict:
    """Verify rho_bar(d)^alpha <= transformed distance <= d^alpha (+slack)
    on every pair with source distance >= 1."""
    sd, td_orig = original.pair_arrays()
    _, td_new = transformed.pair_arrays()
    checked = 0
    lower_ok = True
    upper_ok = True
    worst = (math.inf, math.inf)
    for idx in range(len(sd)):
        u = sd[idx]
        if u < 1.0:
            continue
        rb = profile.rho_bar_at(u)
        checked += 1
        val = td_new[idx]
        upper = u**alpha
        lo_margin = val - (rb**alpha if not math.isnan(rb) else 0.0)
        hi_margin = upper + slack - val
        worst = (min(worst[0], lo_margin), min(worst[1], hi_margin))
        if not math.isnan(rb) and val < rb**alpha - slack:
            lower_ok = False
        if val > upper + slack:
            upper_ok = False
    return {
        "pairs_checked": checked,
        "lower_ok": lower_ok,
        "upper_ok": upper_ok,
        "worst_lower_margin": worst[0],
        "worst_upper_margin": worst[1],
    }
