"""Finite metric spaces, sampled maps, and the three embedding moduli.

The central objects are a finite metric space (labels + distance matrix),
a sampled map between two spaces (parallel lists of source/image points),
and the binned modulus profile estimating

    omega(t) = sup image distance over source pairs at distance <= t
    rho(t)   = inf image distance over source pairs at distance >= t
    rho_bar(t) = inf image distance over source pairs at distance "= t"
                 (bin membership at desk scale)

plus the finite-scale map taxonomy (coarse / expanding / solvent /
uncollapsed / almost uncollapsed) and delta-net utilities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "FiniteMetricSpace",
    "NormedPoint",
    "SampledMap",
    "ModulusProfile",
    "TaxonomyReport",
    "ClassifyParams",
    "ViolationError",
    "lr_norm",
    "lr_dist",
    "expansion_modulus",
    "compression_moduli",
    "uniform_bins",
    "classify",
    "extract_net",
    "net_transfer_check",
]


class ViolationError(AssertionError):
    """A structural invariant that should hold by theorem failed on data."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def lr_norm(x, r) -> float:
    """l_r norm of a (possibly complex) coordinate vector, r in [1, inf]."""
    a = np.abs(np.asarray(x, dtype=complex))
    if math.isinf(r):
        return float(a.max()) if a.size else 0.0
    if r == 1:
        return float(a.sum())
    if r == 2:
        return float(np.sqrt((a * a).sum()))
    return float((a**r).sum() ** (1.0 / r))


def lr_dist(x, y, r) -> float:
    return lr_norm(np.asarray(x, dtype=complex) - np.asarray(y, dtype=complex), r)


@dataclass(frozen=True)
class NormedPoint:
    """A point of l_r^n(C) (or a real Euclidean space via real=True, r=2)."""

    coords: tuple
    r: float = 2.0
    real: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))
        if self.r < 1:
            raise ValueError("norm exponent r must be >= 1")
        if self.real and any(c.imag != 0 for c in self.coords):
            raise ValueError("real-valued point carries nonzero imaginary parts")

    @property
    def norm_kind(self) -> str:
        if self.real and self.r == 2:
            return "euclidean-real"
        return "l_inf" if math.isinf(self.r) else f"l_{self.r:g}"

    def norm(self) -> float:
        return lr_norm(np.array(self.coords), self.r)

    def dist(self, other: "NormedPoint") -> float:
        if other.r != self.r:
            raise ValueError("points live in different normed spaces")
        return lr_dist(np.array(self.coords), np.array(other.coords), self.r)


# ---------------------------------------------------------------------------
# finite metric spaces
# ---------------------------------------------------------------------------

TRIANGLE_TOL = 1e-12


@dataclass
class FiniteMetricSpace:
    """Point labels plus a validated symmetric distance matrix."""

    labels: list
    dist: np.ndarray

    def __post_init__(self):
        self.dist = np.asarray(self.dist, dtype=float)
        n = len(self.labels)
        if self.dist.shape != (n, n):
            raise ValueError(f"distance matrix shape {self.dist.shape} != ({n},{n})")
        if n and np.abs(np.diag(self.dist)).max() > 0:
            raise ValueError("nonzero diagonal")
        if n and np.abs(self.dist - self.dist.T).max() > 0:
            raise ValueError("asymmetric distance matrix")
        if (self.dist < 0).any():
            raise ValueError("negative distance")
        self._check_triangle()

    def _check_triangle(self):
        D = self.dist
        n = len(self.labels)
        # d[i,k] <= d[i,j] + d[j,k] for all i,j,k; chunk over i to bound memory
        step = max(1, int(2e7 // max(1, n * n)))
        for lo in range(0, n, step):
            hi = min(n, lo + step)
            slack = D[lo:hi, None, :] - D[lo:hi, :, None] - D[None, :, :]
            if slack.size and slack.max() > TRIANGLE_TOL:
                i, j, k = np.unravel_index(np.argmax(slack), slack.shape)
                raise ValueError(
                    f"triangle inequality fails at ({lo + i},{j},{k}) "
                    f"by {slack[i, j, k]:.3e}"
                )

    def __len__(self):
        return len(self.labels)

    @classmethod
    def from_points(cls, points, r=2.0, labels=None):
        """Space of finitely many l_r points with the induced metric."""
        pts = np.asarray(points, dtype=complex)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = len(pts)
        diff = np.abs(pts[:, None, :] - pts[None, :, :])
        if math.isinf(r):
            D = diff.max(axis=2) if pts.shape[1] else np.zeros((n, n))
        else:
            D = (diff**r).sum(axis=2) ** (1.0 / r)
        if labels is None:
            labels = [str(i) for i in range(n)]
        return cls(list(labels), D)

    def to_json(self) -> dict:
        return {"labels": [str(l) for l in self.labels], "dist": self.dist.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteMetricSpace":
        if set(obj) != {"labels", "dist"}:
            raise ValueError(f"metric space JSON must have exactly labels/dist, got {sorted(obj)}")
        return cls(list(obj["labels"]), np.asarray(obj["dist"], dtype=float))


# ---------------------------------------------------------------------------
# sampled maps
# ---------------------------------------------------------------------------

def _as_point_matrix(points) -> np.ndarray:
    pts = np.asarray(points)
    if pts.dtype == object:
        raise ValueError("ragged point array")
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts.astype(complex)


@dataclass
class SampledMap:
    """A finite list of (source point, image point) pairs between two spaces.

    Points are either coordinate vectors in an l_r space or integer indices
    into a FiniteMetricSpace; each side carries a distance evaluator. All
    moduli are computed over the sampled pairs only.
    """

    source_points: np.ndarray
    image_points: np.ndarray
    source_dist: Callable
    target_dist: Callable
    source_kind: tuple = ("lr", 2.0)
    image_kind: tuple = ("lr", 2.0)
    _pairs: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.source_points) != len(self.image_points):
            raise ValueError("source/image sequences differ in length")
        if len(self.source_points) < 2:
            raise ValueError("no samples")

    def __len__(self):
        return len(self.source_points)

    @classmethod
    def from_lr_points(cls, source, image, r_source=2.0, r_image=2.0):
        src = _as_point_matrix(source)
        img = _as_point_matrix(image)
        return cls(
            src,
            img,
            source_dist=lambda a, b: lr_dist(a, b, r_source),
            target_dist=lambda a, b: lr_dist(a, b, r_image),
            source_kind=("lr", r_source),
            image_kind=("lr", r_image),
        )

    @classmethod
    def from_function(cls, source, f, r_source=2.0, r_image=2.0):
        src = _as_point_matrix(source)
        img = _as_point_matrix([f(p) for p in src])
        return cls.from_lr_points(src, img, r_source, r_image)

    @classmethod
    def from_space_indices(cls, source_space, image_space, src_idx, img_idx):
        src = np.asarray(src_idx, dtype=int)
        img = np.asarray(img_idx, dtype=int)
        return cls(
            src,
            img,
            source_dist=lambda a, b: float(source_space.dist[int(a), int(b)]),
            target_dist=lambda a, b: float(image_space.dist[int(a), int(b)]),
            source_kind=("space", source_space),
            image_kind=("space", image_space),
        )

    def _pairwise(self, points, kind):
        """Condensed pairwise distances (i < j), vectorized for known kinds."""
        kindname, param = kind
        n = len(points)
        iu, ju = np.triu_indices(n, k=1)
        if kindname == "lr":
            pts = np.asarray(points, dtype=complex)
            if pts.ndim == 1:
                pts = pts[:, None]
            out = np.empty(len(iu))
            step = max(1, int(4e7 // max(1, pts.shape[1])))
            for lo in range(0, len(iu), step):
                hi = min(len(iu), lo + step)
                diff = np.abs(pts[iu[lo:hi]] - pts[ju[lo:hi]])
                if math.isinf(param):
                    out[lo:hi] = diff.max(axis=1)
                elif param == 2:
                    out[lo:hi] = np.sqrt((diff * diff).sum(axis=1))
                elif param == 1:
                    out[lo:hi] = diff.sum(axis=1)
                else:
                    out[lo:hi] = (diff**param).sum(axis=1) ** (1.0 / param)
            return iu, ju, out
        if kindname == "space":
            idx = np.asarray(points, dtype=int)
            return iu, ju, param.dist[idx[iu], idx[ju]]
        # custom evaluator: plain loop
        dist = self.source_dist if points is self.source_points else self.target_dist
        return iu, ju, np.array([dist(points[i], points[j]) for i, j in zip(iu, ju)])

    def pair_arrays(self):
        """(source distances, image distances) over all pairs i < j, cached."""
        if self._pairs is None:
            _, _, sd = self._pairwise(self.source_points, self.source_kind)
            _, _, td = self._pairwise(self.image_points, self.image_kind)
            if not (np.isfinite(sd).all() and np.isfinite(td).all()):
                raise ValueError("non-finite distance in sample")
            if sd.min(initial=0.0) < 0 or td.min(initial=0.0) < 0:
                raise ValueError("negative distance in sample")
            object.__setattr__(self, "_pairs", (sd, td))
        return self._pairs

    def scaled_image(self, lam: float) -> "SampledMap":
        """The map with target distances rescaled by lam > 0 (lam * f)."""
        if lam <= 0:
            raise ValueError("scale must be positive")
        td_scale = self.target_dist
        m = SampledMap(
            self.source_points,
            self.image_points,
            self.source_dist,
            lambda a, b: lam * td_scale(a, b),
            self.source_kind,
            ("scaled", (lam, self.image_kind)),
        )
        sd, td = self.pair_arrays()
        object.__setattr__(m, "_pairs", (sd, lam * td))
        return m

    def restrict(self, indices) -> "SampledMap":
        idx = np.asarray(sorted(indices), dtype=int)
        return SampledMap(
            self.source_points[idx],
            self.image_points[idx],
            self.source_dist,
            self.target_dist,
            self.source_kind,
            self.image_kind,
        )


# ---------------------------------------------------------------------------
# moduli
# ---------------------------------------------------------------------------

def expansion_modulus(smap: SampledMap, t: float) -> float:
    """sup image distance over sampled pairs at source distance <= t (0 if none)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    sd, td = smap.pair_arrays()
    sel = sd <= t
    return float(td[sel].max()) if sel.any() else 0.0


@dataclass
class ModulusProfile:
    """Binned omega / rho / rho_bar estimates.

    Bin b covers [bin_edges[b], bin_edges[b+1]) (last bin closed on the
    right). omega[b] is cumulative (pairs with sd <= upper edge), rho[b] is
    the tail infimum (sd >= lower edge), rho_bar[b] the in-bin infimum.
    Bins with no qualifying pair carry NaN plus an explicit empty flag,
    never a fabricated 0.
    """

    bin_edges: np.ndarray
    omega: np.ndarray
    rho: np.ndarray
    rho_bar: np.ndarray
    rho_empty: np.ndarray
    rho_bar_empty: np.ndarray

    @property
    def n_bins(self):
        return len(self.bin_edges) - 1

    def rho_bar_at(self, t: float) -> float:
        """rho_bar of the bin containing t; NaN outside the range or empty."""
        b = bin_index(self.bin_edges, t)
        if b is None or self.rho_bar_empty[b]:
            return float("nan")
        return float(self.rho_bar[b])

    def to_json(self) -> dict:
        def _null(a, empty):
            return [None if e else float(v) for v, e in zip(a, empty)]

        return {
            "bin_edges": [float(e) for e in self.bin_edges],
            "omega": [float(v) for v in self.omega],
            "rho": _null(self.rho, self.rho_empty),
            "rho_bar": _null(self.rho_bar, self.rho_bar_empty),
        }

    def to_csv(self) -> str:
        lines = ["t_lo,t_hi,omega,rho,rho_bar,empty_flag"]
        for b in range(self.n_bins):
            rho = "" if self.rho_empty[b] else repr(float(self.rho[b]))
            rbar = "" if self.rho_bar_empty[b] else repr(float(self.rho_bar[b]))
            lines.append(
                f"{self.bin_edges[b]!r},{self.bin_edges[b + 1]!r},"
                f"{float(self.omega[b])!r},{rho},{rbar},{int(self.rho_bar_empty[b])}"
            )
        return "\n".join(lines) + "\n"


def bin_index(edges, t):
    """Index of the bin containing t (last bin right-closed), else None."""
    edges = np.asarray(edges)
    if t < edges[0] or t > edges[-1]:
        return None
    b = int(np.searchsorted(edges, t, side="right") - 1)
    return min(b, len(edges) - 2)


def uniform_bins(smap: SampledMap, n_bins: int = 64) -> np.ndarray:
    """Default binning: n_bins uniform bins over the observed distance range."""
    sd, _ = smap.pair_arrays()
    lo, hi = float(sd.min()), float(sd.max())
    if hi <= lo:
        hi = lo + max(1.0, abs(lo)) * 1e-6
    return np.linspace(lo, hi, n_bins + 1)


def compression_moduli(smap: SampledMap, bins) -> ModulusProfile:
    """Fill the binned profile from the sampled pairs.

    rho uses the tail sd >= lower edge; rho_bar treats bin membership as the
    equality surrogate for d(x,y) = t.
    """
    edges = np.asarray(bins, dtype=float)
    if len(edges) < 2 or (np.diff(edges) <= 0).any():
        raise ValueError("bins must be strictly increasing")
    if edges[0] < 0:
        raise ValueError("bins must be nonnegative")
    sd, td = smap.pair_arrays()
    B = len(edges) - 1
    omega = np.zeros(B)
    rho = np.full(B, np.nan)
    rho_bar = np.full(B, np.nan)
    rho_empty = np.ones(B, dtype=bool)
    rho_bar_empty = np.ones(B, dtype=bool)

    order = np.argsort(sd, kind="stable")
    sd_s, td_s = sd[order], td[order]
    # cumulative sup of td in sd order gives omega at any upper edge
    cummax = np.maximum.accumulate(td_s)
    # suffix min of td gives rho at any lower edge
    sufmin = np.minimum.accumulate(td_s[::-1])[::-1]

    for b in range(B):
        hi_cnt = int(np.searchsorted(sd_s, edges[b + 1], side="right"))
        if hi_cnt:
            omega[b] = cummax[hi_cnt - 1]
        lo_cnt = int(np.searchsorted(sd_s, edges[b], side="left"))
        if lo_cnt < len(sd_s):
            rho[b] = sufmin[lo_cnt]
            rho_empty[b] = False
        # bin membership: [lo, hi) except the last bin, which is right-closed
        lo_in = lo_cnt
        side = "right" if b == B - 1 else "left"
        hi_in = int(np.searchsorted(sd_s, edges[b + 1], side=side))
        if hi_in > lo_in:
            rho_bar[b] = td_s[lo_in:hi_in].min()
            rho_bar_empty[b] = False
    return ModulusProfile(edges, omega, rho, rho_bar, rho_empty, rho_bar_empty)


# ---------------------------------------------------------------------------
# taxonomy
# ---------------------------------------------------------------------------

@dataclass
class ClassifyParams:
    """Scale thresholds for the finite taxonomy.

    t_grid doubles as the bin edges of the underlying profile. zero_tol
    defaults to 1e-9 * (max image distance), scale-free.
    """

    t_grid: Optional[Sequence[float]] = None
    n_bins: int = 64
    n_max: int = 8
    zero_tol: Optional[float] = None


@dataclass
class TaxonomyReport:
    """Finite-scale verdicts for one sampled map (Diagram-style flags).

    solvent_at_scale lists, per depth n, the smallest observed window base R
    whose pairs at source distance in [R, R+n] all map beyond n. The logical
    arrows (expanding => solvent nonempty and uncollapsed; uncollapsed =>
    almost uncollapsed) are asserted at construction time.
    """

    coarse_at_scale: bool
    max_omega: float
    expanding_at_scale: bool
    solvent_at_scale: list
    uncollapsed: bool
    uncollapsed_witness: Optional[float]
    almost_uncollapsed: bool
    almost_uncollapsed_witness: Optional[float]
    linear_growth_constant: float
    zero_tol: float
    bin_width_note: str = ""

    def __post_init__(self):
        if self.expanding_at_scale and not (self.solvent_at_scale and self.uncollapsed):
            raise ViolationError("expanding map failed the solvent/uncollapsed arrows", self)
        if self.uncollapsed and not self.almost_uncollapsed:
            raise ViolationError("uncollapsed map reported collapsed rho_bar", self)

    def to_json(self) -> dict:
        return {
            "coarse_at_scale": self.coarse_at_scale,
            "max_omega": self.max_omega,
            "expanding_at_scale": self.expanding_at_scale,
            "solvent_at_scale": [[int(n), float(r)] for n, r in self.solvent_at_scale],
            "uncollapsed": self.uncollapsed,
            "uncollapsed_witness": self.uncollapsed_witness,
            "almost_uncollapsed": self.almost_uncollapsed,
            "almost_uncollapsed_witness": self.almost_uncollapsed_witness,
            "linear_growth_constant": self.linear_growth_constant,
            "zero_tol": self.zero_tol,
            "bin_width_note": self.bin_width_note,
        }


def classify(smap: SampledMap, params: ClassifyParams = None) -> TaxonomyReport:
    """Finite-scale taxonomy verdicts from the binned profile.

    Solvency truncates the paper-style "for all n exists R" at n_max, with R
    ranging over observed distances (so the window is never vacuous).
    Expanding-at-scale requires rho to clear every depth n <= n_max at some
    grid edge. No claim is made about the infinite-scale properties.
    """
    params = params or ClassifyParams()
    sd, td = smap.pair_arrays()
    edges = np.asarray(params.t_grid, dtype=float) if params.t_grid is not None else uniform_bins(smap, params.n_bins)
    profile = compression_moduli(smap, edges)
    max_td = float(td.max()) if len(td) else 0.0
    tol = params.zero_tol if params.zero_tol is not None else 1e-9 * max_td

    max_omega = float(profile.omega.max()) if profile.n_bins else 0.0
    # least L with omega(t) <= L*t + L over the grid upper edges
    L = 0.0
    for b in range(profile.n_bins):
        t = profile.bin_edges[b + 1]
        L = max(L, profile.omega[b] / (t + 1.0))

    # solvency windows over observed distances
    order = np.argsort(sd, kind="stable")
    sd_s, td_s = sd[order], td[order]
    solvent = []
    r_candidates = np.unique(sd_s)
    for n in range(1, params.n_max + 1):
        found = None
        for R in r_candidates:
            lo = int(np.searchsorted(sd_s, R, side="left"))
            hi = int(np.searchsorted(sd_s, R + n, side="right"))
            if hi > lo and td_s[lo:hi].min() > n:
                found = float(R)
                break
        if found is not None:
            solvent.append((n, found))

    solved_depths = {n for n, _ in solvent}
    # rho(t) > n at some positive grid edge, for every depth n <= n_max
    pos = [
        b
        for b in range(profile.n_bins)
        if profile.bin_edges[b] > 0 and not profile.rho_empty[b]
    ]
    expanding = all(
        any(profile.rho[b] > max(n, tol) for b in pos) for n in range(1, params.n_max + 1)
    ) and bool(pos)
    # the arrows are structural; guard against pathological tolerance scales
    if expanding:
        expanding = set(range(1, params.n_max + 1)) <= solved_depths

    unc_b = next((b for b in pos if profile.rho[b] > tol), None)
    almost_b = next(
        (
            b
            for b in range(profile.n_bins)
            if profile.bin_edges[b] > 0
            and not profile.rho_bar_empty[b]
            and profile.rho_bar[b] > tol
        ),
        None,
    )
    return TaxonomyReport(
        coarse_at_scale=True,
        max_omega=max_omega,
        expanding_at_scale=expanding,
        solvent_at_scale=solvent,
        uncollapsed=unc_b is not None,
        uncollapsed_witness=float(profile.bin_edges[unc_b]) if unc_b is not None else None,
        almost_uncollapsed=almost_b is not None,
        almost_uncollapsed_witness=float(profile.bin_edges[almost_b]) if almost_b is not None else None,
        linear_growth_constant=float(L),
        zero_tol=float(tol),
        bin_width_note=f"{profile.n_bins} bins over [{edges[0]:g}, {edges[-1]:g}]; "
        "rho_bar equality read as bin membership",
    )


# ---------------------------------------------------------------------------
# delta nets
# ---------------------------------------------------------------------------

def extract_net(space: FiniteMetricSpace, delta: float):
    """Greedy maximal delta-separated subset (first-index tie-break).

    The result is automatically delta-dense: every point sits strictly
    within delta of some kept index.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    kept = []
    D = space.dist
    for i in range(len(space)):
        if all(D[i, j] >= delta for j in kept):
            kept.append(i)
    return kept


def net_is_dense(space: FiniteMetricSpace, net, delta: float) -> bool:
    D = space.dist
    return all(min(D[i, j] for j in net) < delta for i in range(len(space)))


def net_transfer_check(full_map: SampledMap, net_indices, delta: float, n: int, R: float) -> dict:
    """Quantitative net-to-full solvency transfer at one window [R, R+n].

    Hypothesis: net pairs with source distance in [R-2*delta, R+n+2*delta]
    all have image distance > n + 2*omega(delta). Conclusion: full pairs in
    [R, R+n] all map beyond n. Hypothesis => conclusion is a theorem on the
    sample and is asserted.
    """
    net = sorted(set(int(i) for i in net_indices))
    N = len(full_map)
    if not net or any(i < 0 or i >= N for i in net):
        raise ValueError("net indices out of range")
    sdist = full_map.source_dist
    pts = full_map.source_points
    for i in range(N):
        if min(sdist(pts[i], pts[j]) for j in net) >= delta:
            raise ValueError(f"net is not {delta}-dense in the sampled source (point {i})")

    omega_delta = expansion_modulus(full_map, delta)
    sd, td = full_map.pair_arrays()
    iu, ju = np.triu_indices(N, k=1)
    in_net = np.isin(iu, net) & np.isin(ju, net)

    hyp_sel = in_net & (sd >= R - 2 * delta) & (sd <= R + n + 2 * delta)
    hypothesis = bool((td[hyp_sel] > n + 2 * omega_delta).all()) if hyp_sel.any() else True
    con_sel = (sd >= R) & (sd <= R + n)
    conclusion = bool((td[con_sel] > n).all()) if con_sel.any() else True

    report = {
        "delta": delta,
        "n": n,
        "R": R,
        "omega_delta": omega_delta,
        "hypothesis_pairs": int(hyp_sel.sum()),
        "conclusion_pairs": int(con_sel.sum()),
        "hypothesis_holds": hypothesis,
        "conclusion_holds": conclusion,
        "implication_ok": (not hypothesis) or conclusion,
    }
    if not report["implication_ok"]:
        raise ViolationError("net transfer implication failed on sample", report)
    return report


# ---------------------------------------------------------------------------
# JSON plumbing for sampled maps
# ---------------------------------------------------------------------------

def _space_desc_to_kind(desc: dict):
    kind = desc.get("kind")
    if kind == "lr":
        extra = set(desc) - {"kind", "r"}
        if extra:
            raise ValueError(f"unknown fields in lr space descriptor: {sorted(extra)}")
        r = desc.get("r", 2.0)
        r = float("inf") if r in ("inf", "Infinity") else float(r)
        return ("lr", r)
    if kind == "metric":
        extra = set(desc) - {"kind", "labels", "dist"}
        if extra:
            raise ValueError(f"unknown fields in metric space descriptor: {sorted(extra)}")
        return ("space", FiniteMetricSpace(list(desc["labels"]), np.asarray(desc["dist"], float)))
    raise ValueError(f"unknown space kind {kind!r}")


def _parse_points(raw, kind):
    if kind[0] == "space":
        return np.asarray(raw, dtype=int)
    pts = []
    for p in raw:
        if isinstance(p, dict):
            re = np.asarray(p["re"], dtype=float)
            im = np.asarray(p.get("im", np.zeros_like(re)), dtype=float)
            pts.append(re + 1j * im)
        elif isinstance(p, (list, tuple)):
            pts.append(np.asarray(p, dtype=float).astype(complex))
        else:
            pts.append(np.array([complex(p)]))
    width = {len(p) for p in pts}
    if len(width) != 1:
        raise ValueError("points of mixed dimension")
    return np.stack(pts)


def sampled_map_from_json(obj: dict) -> SampledMap:
    required = {"source_space", "image_space", "source", "image"}
    if set(obj) != required:
        raise ValueError(f"sampled map JSON needs exactly {sorted(required)}, got {sorted(obj)}")
    skind = _space_desc_to_kind(obj["source_space"])
    ikind = _space_desc_to_kind(obj["image_space"])
    src = _parse_points(obj["source"], skind)
    img = _parse_points(obj["image"], ikind)

    def _dist_for(kind):
        if kind[0] == "lr":
            return lambda a, b, r=kind[1]: lr_dist(a, b, r)
        return lambda a, b, sp=kind[1]: float(sp.dist[int(a), int(b)])

    return SampledMap(src, img, _dist_for(skind), _dist_for(ikind), skind, ikind)


def load_sampled_map(path) -> SampledMap:
    with open(path) as fh:
        return sampled_map_from_json(json.load(fh))
