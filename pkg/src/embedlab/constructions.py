"""Explicit maps: the Lipschitz solvent-collapsed cocycle, the amplification
of an almost-uncollapsed base map, the torus half-period witness, and the
sup-norm scaling lift.

The cocycle lives on the additive reals acting on a truncated complex
sequence space. Time parameters are exact rationals; each coordinate phase
t / 2^(2^n) is reduced modulo 1 in arbitrary-precision integer arithmetic
before any floating conversion (a naive float division loses all phase
information by the fifth coordinate).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .metric_core import ModulusProfile, SampledMap, ViolationError, expansion_modulus, lr_dist

__all__ = [
    "RationalScalar",
    "CocycleConfig",
    "CocycleCheckReport",
    "PrecisionError",
    "DomainError",
    "cocycle_eval",
    "cocycle_phases",
    "cocycle_norm",
    "affine_action",
    "truncated_lipschitz_constant",
    "collapse_bound",
    "cocycle_norm_checks",
    "cocycle_solvency_witness",
    "AmplificationConfig",
    "amplify",
    "amplified_distance",
    "TorusWitnessConfig",
    "torus_witness",
    "witness_lattice",
    "linfty_lift",
    "lift_report",
]

RationalScalar = Fraction  # exact, reduced, positive denominator

MAX_TRUNCATION = 16  # exponent bit-length 2^16 stays tractable


class PrecisionError(ValueError):
    """Exact phase cannot be represented to 1e-15 relative in floating point."""


class DomainError(ValueError):
    """Base map not evaluable at the requested point."""


@dataclass(frozen=True)
class CocycleConfig:
    """Truncation of the coordinate sequence; exponents 2^(2^n), n = 1..N."""

    N: int
    exponents: tuple = field(init=False)

    def __post_init__(self):
        if not 1 <= self.N <= MAX_TRUNCATION:
            raise ValueError(f"truncation must be in 1..{MAX_TRUNCATION}")
        object.__setattr__(self, "exponents", tuple(2 ** (2**n) for n in range(1, self.N + 1)))


def _as_rational(t) -> Fraction:
    if isinstance(t, Fraction):
        return t
    if isinstance(t, int):
        return Fraction(t)
    raise TypeError(f"time parameter must be an exact rational, got {type(t).__name__}")


def cocycle_phases(t, cfg: CocycleConfig):
    """Exact phase fractions (t mod 2^(2^n)) / 2^(2^n) in [0, 1), per coordinate."""
    t = _as_rational(t)
    p, q = t.numerator, t.denominator
    fracs = []
    for M in cfg.exponents:
        # t mod M = ((p mod M*q) / q), exact on the numerator
        fracs.append(Fraction(p % (M * q), q * M))
    return fracs


def _frac_to_float(frac: Fraction) -> float:
    f = float(frac)
    if frac != 0:
        err = abs(Fraction(f) - frac) / frac
        if err > Fraction(1, 10**15):
            raise PrecisionError("precision: phase fraction not representable to 1e-15 relative")
    if frac != 1 and (1 - frac) != 0:
        g = float(1 - frac)
        err = abs(Fraction(g) - (1 - frac)) / (1 - frac)
        if err > Fraction(1, 10**15):
            raise PrecisionError("precision: phase fraction too close to a full period")
    return f


def cocycle_eval(t, cfg: CocycleConfig) -> np.ndarray:
    """b(t): coordinate n is 1 - exp(2*pi*i * frac_n), frac_n reduced exactly.

    Integer phases are detected in exact arithmetic and produce coordinates
    that are exactly zero.
    """
    out = np.zeros(cfg.N, dtype=complex)
    half_period = Fraction(1, 2)
    for i, frac in enumerate(cocycle_phases(t, cfg)):
        if frac == 0:
            continue
        if frac == half_period:
            out[i] = 2.0  # phase exactly pi: 1 - e^{i pi} = 2
            continue
        fl = _frac_to_float(frac)
        if frac < half_period:
            s, c = math.sin(math.pi * fl), math.cos(math.pi * fl)
        else:
            # reflect: sin keeps relative accuracy near the full period
            gl = float(1 - frac)
            s, c = math.sin(math.pi * gl), -math.cos(math.pi * gl)
        # 1 - e^{i*theta} = 2 sin^2(theta/2) - 2i sin(theta/2) cos(theta/2)
        out[i] = complex(2.0 * s * s, -2.0 * s * c)
    return out


def cocycle_norm(t, cfg: CocycleConfig) -> float:
    return float(np.linalg.norm(cocycle_eval(t, cfg)))


def affine_action(t, x, cfg: CocycleConfig) -> np.ndarray:
    """alpha_t(x) = w + U_t(x - w) coordinate-wise, w the truncated all-ones."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (cfg.N,):
        raise ValueError(f"vector must have length {cfg.N}")
    rot = np.ones(cfg.N, dtype=complex)
    for i, frac in enumerate(cocycle_phases(t, cfg)):
        if frac == 0:
            continue
        theta = 2.0 * math.pi * _frac_to_float(frac)
        rot[i] = complex(math.cos(theta), math.sin(theta))
    w = np.ones(cfg.N, dtype=complex)
    return w + rot * (x - w)


def truncated_lipschitz_constant(cfg: CocycleConfig) -> float:
    """C_N = sum of (2*pi / 2^(2^n))^2 over kept coordinates, by partial summation."""
    # ldexp keeps the huge exponents in integer form; underflow to 0 is harmless
    return sum(math.ldexp((2.0 * math.pi) ** 2, -(2 ** (n + 1))) for n in range(1, cfg.N + 1))


def collapse_bound(k: int, cfg: CocycleConfig) -> float:
    """Upper bound on ||b(2^(2^k))||^2: sum over n > k of (2*pi*2^(2^k)/2^(2^n))^2."""
    total = 0.0
    for n in range(k + 1, cfg.N + 1):
        total += math.ldexp((2.0 * math.pi) ** 2, 2 * (2**k - 2**n))
    return total


@dataclass
class CocycleCheckReport:
    """Lipschitz / cocycle-identity / collapse verification on exact samples."""

    C_N: float
    max_lipschitz_excess: float
    max_identity_residual: float
    collapse: list  # rows (k, norm, bound_sqrt)
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "C_N": self.C_N,
            "max_lipschitz_excess": self.max_lipschitz_excess,
            "max_identity_residual": self.max_identity_residual,
            "collapse": [
                {"k": int(k), "norm": float(v), "paper_bound": float(b)}
                for k, v, b in self.collapse
            ],
            "violations": list(self.violations),
            "ok": self.ok,
        }

    def collapse_csv(self) -> str:
        lines = ["k,norm,paper_bound"]
        for k, v, b in self.collapse:
            lines.append(f"{int(k)},{float(v)!r},{float(b)!r}")
        return "\n".join(lines) + "\n"


def cocycle_norm_checks(cfg: CocycleConfig, t_samples, identity_pairs=None) -> CocycleCheckReport:
    """Verify ||b(t)|| <= sqrt(C_N)|t|, the cocycle identity, and the collapse
    sequence with its closed-form bound. Violations are collected into the
    report rather than silently dropped.
    """
    violations = []
    C = truncated_lipschitz_constant(cfg)
    sqrtC = math.sqrt(C)

    max_excess = -math.inf
    samples = [_as_rational(t) for t in t_samples]
    for t in samples:
        nrm = cocycle_norm(t, cfg)
        bound = sqrtC * abs(float(t))
        excess = nrm - bound
        max_excess = max(max_excess, excess)
        if nrm > bound * (1 + 1e-12) + 1e-12:
            violations.append(f"lipschitz: ||b({t})|| = {nrm} exceeds sqrt(C_N)|t| = {bound}")

    if identity_pairs is None:
        identity_pairs = [(a, b) for a, b in zip(samples, samples[1:])]
    max_resid = 0.0
    for s, t in identity_pairs:
        s, t = _as_rational(s), _as_rational(t)
        lhs = float(np.linalg.norm(cocycle_eval(t, cfg) - cocycle_eval(s, cfg)))
        rhs = cocycle_norm(t - s, cfg)
        resid = abs(lhs - rhs)
        max_resid = max(max_resid, resid)
        if resid > 1e-12:
            violations.append(f"identity: ||b({t})-b({s})|| vs ||b({t - s})|| off by {resid}")

    collapse = []
    prev = math.inf
    for k in range(1, cfg.N):
        tk = Fraction(2 ** (2**k))
        vec = cocycle_eval(tk, cfg)
        if np.abs(vec[:k]).max(initial=0.0) != 0.0:
            violations.append(f"collapse: coordinate below k={k} not exactly zero")
        nrm2 = float((np.abs(vec) ** 2).sum())
        bound2 = collapse_bound(k, cfg)
        if nrm2 > bound2:
            violations.append(f"collapse: ||b(2^2^{k})||^2 = {nrm2} exceeds bound {bound2}")
        nrm = math.sqrt(nrm2)
        if nrm >= prev:
            violations.append(f"collapse: norm sequence not strictly decreasing at k={k}")
        prev = nrm
        collapse.append((k, nrm, math.sqrt(bound2)))

    return CocycleCheckReport(C, max_excess, max_resid, collapse, violations)


def cocycle_solvency_witness(cfg: CocycleConfig, target: float, search_budget: int = 20000, margin: float = 1e-9):
    """Exact rational t with ||b(t)|| >= target, by phase-alignment enumeration.

    Candidates t = sum over a coordinate subset S of half-periods 2^(2^n)/2;
    each aligns coordinate n near the antipode while polluting lower
    coordinates only slightly. Subsets are enumerated by size then
    lexicographically, and every candidate is re-verified by exact
    evaluation. Returns None when the budget runs out.
    """
    ceiling = 2.0 * math.sqrt(cfg.N)
    if target > ceiling - margin:
        raise ValueError(f"unreachable at truncation N={cfg.N}: target {target} vs ceiling {ceiling}")
    if target <= 0:
        return Fraction(0)
    half_periods = [M // 2 for M in cfg.exponents]
    spent = 0
    for size in range(1, cfg.N + 1):
        for subset in itertools.combinations(range(cfg.N), size):
            if spent >= search_budget:
                return None
            spent += 1
            t = Fraction(sum(half_periods[i] for i in subset))
            if cocycle_norm(t, cfg) >= target:
                return t
    return None


# ---------------------------------------------------------------------------
# amplification
# ---------------------------------------------------------------------------

@dataclass
class AmplificationConfig:
    """Blocks Phi_n(x) = n * phi(eps_n * x / n) with a pluggable aggregation.

    eps_n must give omega_phi(eps_n) < 1/(n * 2^n) on the certification
    sample; the margins are checked at construction when a sample is given.
    """

    eps_seq: Sequence[float]
    phi: Callable
    phi_samples: Optional[SampledMap] = None
    target_r: float = 2.0
    margins: list = field(default_factory=list)

    def __post_init__(self):
        if any(e <= 0 for e in self.eps_seq):
            raise ValueError("eps_seq must be positive")
        if self.phi_samples is not None:
            for i, eps in enumerate(self.eps_seq):
                n = i + 1
                omega = expansion_modulus(self.phi_samples, eps)
                bound = 1.0 / (n * 2.0**n)
                self.margins.append({"n": n, "eps": eps, "omega": omega, "bound": bound})
                if omega >= bound:
                    raise ValueError(
                        f"omega_phi(eps_{n}) = {omega} not below 1/(n 2^n) = {bound}"
                    )

    @property
    def n_max(self) -> int:
        return len(self.eps_seq)


def amplify(cfg: AmplificationConfig, x, K: int):
    """The first K blocks (n * phi(eps_n x / n))_{n<=K} as image-space points."""
    if K > cfg.n_max:
        raise ValueError(f"truncation K={K} beyond configured n_max={cfg.n_max}")
    x = np.asarray(x, dtype=float)
    blocks = []
    for n in range(1, K + 1):
        arg = cfg.eps_seq[n - 1] * x / n
        blocks.append(n * np.asarray(cfg.phi(arg), dtype=complex))
    return blocks


_AGGREGATORS = {
    "l2": lambda b: float(np.sqrt((np.asarray(b) ** 2).sum())),
    "l1": lambda b: float(np.asarray(b).sum()),
    "sup": lambda b: float(np.asarray(b).max()),
}


def amplified_distance(cfg: AmplificationConfig, x, y, K: int, agg: str = "l2") -> float:
    """Aggregated distance between Phi(x) and Phi(y) over the first K blocks."""
    if agg not in _AGGREGATORS:
        raise ValueError(f"aggregation must be one of {sorted(_AGGREGATORS)}")
    bx = amplify(cfg, x, K)
    by = amplify(cfg, y, K)
    norms = [lr_dist(a, b, cfg.target_r) for a, b in zip(bx, by)]
    return _AGGREGATORS[agg](norms)


# ---------------------------------------------------------------------------
# torus witness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusWitnessConfig:
    """h(x) = s * sum_j exp(2*pi*i x_j / m) e_j into l_r^n(C)."""

    n: int
    m: int
    r: float
    s: float

    def __post_init__(self):
        if self.m < 2 or self.m % 2:
            raise ValueError("modulus m must be even and >= 2")
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        if self.s <= 0:
            raise ValueError("scale s must be positive")
        if self.r < 1:
            raise ValueError("exponent r must be in [1, inf]")


def torus_witness(cfg: TorusWitnessConfig, x) -> np.ndarray:
    """Witness value at one lattice point; coordinates reduced mod m exactly."""
    x = np.asarray(x, dtype=int) % cfg.m
    if x.shape != (cfg.n,):
        raise ValueError(f"lattice point must have {cfg.n} coordinates")
    theta = 2.0 * math.pi * x / cfg.m
    return cfg.s * (np.cos(theta) + 1j * np.sin(theta))


def witness_lattice(cfg: TorusWitnessConfig) -> np.ndarray:
    """Witness values for all of Z_m^n in row-major order, shape (m^n, n)."""
    grids = np.meshgrid(*([np.arange(cfg.m)] * cfg.n), indexing="ij")
    coords = np.stack(grids, axis=-1).reshape(-1, cfg.n)
    theta = 2.0 * math.pi * coords / cfg.m
    return cfg.s * (np.cos(theta) + 1j * np.sin(theta))


# ---------------------------------------------------------------------------
# sup-norm scaling lift
# ---------------------------------------------------------------------------

def linfty_lift(f: Callable, q_grid, x) -> np.ndarray:
    """F(x) over the (q, n) index set: block q holds f(q x) / q, flattened q-major."""
    qs = [q if isinstance(q, Fraction) else Fraction(q) for q in q_grid]
    if any(q <= 0 for q in qs):
        raise ValueError("q grid must be positive")
    x = np.asarray(x, dtype=float)
    blocks = [np.asarray(f(float(q) * x), dtype=float) / float(q) for q in qs]
    return np.concatenate([np.atleast_1d(b) for b in blocks])


def lift_report(f: Callable, smap: SampledMap, q_grid, t: float, profile: ModulusProfile) -> dict:
    """Lipschitz comparison and the scaling lower bound for the lift of f.

    smap samples f on the source points used for the Lipschitz estimate; the
    lower bound is checked on sampled pairs whose distance u satisfies
    q = t/u in the grid (matched to 1e-12 relative), using rho_bar from the
    binned profile at t.
    """
    qs = [q if isinstance(q, Fraction) else Fraction(q) for q in q_grid]
    if any(q <= 0 for q in qs):
        raise ValueError("q grid must be positive")
    sd, td = smap.pair_arrays()
    pos = sd > 0
    lip_f = float((td[pos] / sd[pos]).max()) if pos.any() else 0.0

    pts = np.asarray(smap.source_points, dtype=complex).real
    lifted = np.stack([linfty_lift(f, qs, p) for p in pts])
    n_pts = len(pts)
    iu, ju = np.triu_indices(n_pts, k=1)
    lift_d = np.abs(lifted[iu] - lifted[ju]).max(axis=1)
    lip_F = float((lift_d[pos] / sd[pos]).max()) if pos.any() else 0.0

    rho_bar_t = profile.rho_bar_at(t)
    checked = 0
    lower_ok = True
    worst_margin = math.inf
    if not math.isnan(rho_bar_t):
        grid_floats = [float(q) for q in qs]
        for k in range(len(sd)):
            u = sd[k]
            if u <= 0:
                continue
            q_want = t / u
            if not any(abs(q_want - g) <= 1e-12 * max(1.0, abs(g)) for g in grid_floats):
                continue
            checked += 1
            lower = (rho_bar_t / t) * u
            margin = lift_d[k] - lower
            worst_margin = min(worst_margin, margin)
            if lift_d[k] < lower - 1e-9:
                lower_ok = False
    return {
        "lip_f": lip_f,
        "lip_F": lip_F,
        "lip_ok": lip_F <= lip_f + 1e-9,
        "t": t,
        "rho_bar_t": rho_bar_t,
        "lower_bound_pairs": checked,
        "lower_bound_ok": lower_ok,
        "lower_bound_worst_margin": None if checked == 0 else worst_margin,
    }
