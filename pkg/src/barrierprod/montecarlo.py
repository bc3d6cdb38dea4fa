"""Monte Carlo barrier statistics under SLN and SABR martingale dynamics.

Paths are simulated for the normalised price ``X_t = S_t / S_0`` (with
``F = S_0``, so ``X_0 = 1``) and every barrier level is monitored on the
same paths, which makes the hit events nested across levels.

Two schemes are available for the shifted log-normal family
``dX = sigma_t (1 + q_t (X - 1)) dW``:

``log``   (default) freezes sigma and q over a step and advances
          ``1 + q f`` exactly as a geometric Brownian motion.  It never
          leaves the model's support and is a martingale step by step.
``euler`` plain Euler-Maruyama; paths pushed outside the support are
          clamped at the boundary and counted.

Barrier crossings between monitoring dates are caught with the Brownian
bridge probability ``exp(-2 (X_i - b)(X_{i+1} - b) / (s^2 dt))`` using the
local volatility at the start of the step and one uniform per path and step
shared by all levels.

Randomness comes from per-block Philox substreams keyed by
``(seed, block)``; blocks have a fixed size derived from ``n_paths`` only,
and tallies are reduced in block order, so results are bit-identical for
any number of worker threads.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from numba import njit
from scipy.stats import norm

from .errors import ConfigurationError, DomainError

N_BATCHES = 100
MAX_CHUNK = 20000
MIN_PATHS_FOR_STATS = 10_000
CLAMP_WARN_RATE = 1e-3
# crossing probabilities below exp(-2 * 20) never beat a double uniform
BB_CUTOFF = 20.0


class DynamicsKind(str, Enum):
    SLN_STATIC = "sln_static"
    SLN_DYNAMIC = "sln_dynamic"
    SABR = "sabr"


@dataclass(frozen=True)
class DynamicsSpec:
    """Martingale dynamics for ``X_t``.

    SLN kinds use ``sigma_t = sigma_A t^alpha`` (``alpha = 0`` gives a flat
    volatility).  The static kind has a constant ``q``; the dynamic kind
    uses ``q_t = -|q_B| t^beta_exp``.  SABR uses ``sigma0, rho, nu, beta``.
    """

    kind: DynamicsKind
    T: float = 1.0
    steps_per_year: int = 250
    sigma_A: float = 0.0
    alpha: float = 0.0
    q: float = 0.0
    q_B: float = 0.0
    beta_exp: float = 0.0
    sigma0: float = 0.0
    rho: float = 0.0
    nu: float = 0.0
    beta: float = 1.0
    scheme: str = "log"

    def __post_init__(self):
        object.__setattr__(self, "kind", DynamicsKind(self.kind))
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigurationError(f"T must be positive, got {self.T}")
        if self.steps_per_year < 1:
            raise ConfigurationError(f"steps_per_year must be >= 1, got {self.steps_per_year}")
        if self.scheme not in ("log", "euler"):
            raise ConfigurationError(f"scheme must be 'log' or 'euler', got {self.scheme!r}")
        if self.kind is DynamicsKind.SABR:
            if not self.sigma0 > 0:
                raise ConfigurationError(f"SABR sigma0 must be positive, got {self.sigma0}")
            if not -1 <= self.rho <= 1 or self.nu < 0 or not 0 <= self.beta <= 1:
                raise ConfigurationError("SABR needs rho in [-1, 1], nu >= 0, beta in [0, 1]")
        elif not self.sigma_A > 0:
            raise ConfigurationError(f"sigma_A must be positive, got {self.sigma_A}")

    # -- constructors mirroring the JSON sections

    @classmethod
    def sln_static(cls, sigma_bar: float | None = None, q: float = 0.0, T: float = 1.0, *,
                   sigma_A: float | None = None, alpha: float = 0.0, **kw) -> "DynamicsSpec":
        """Static skew; give either total volatility ``sigma_bar`` or the curve ``sigma_A t^alpha``."""
        if (sigma_bar is None) == (sigma_A is None):
            raise ConfigurationError("give exactly one of sigma_bar or sigma_A")
        if sigma_A is None:
            sigma_A = sigma_bar / math.sqrt(T)
        return cls(DynamicsKind.SLN_STATIC, T, sigma_A=sigma_A, alpha=alpha, q=q, **kw)

    @classmethod
    def sln_dynamic(cls, sigma_A: float, alpha: float, q_B: float, beta_exp: float, T: float = 1.0, **kw):
        return cls(DynamicsKind.SLN_DYNAMIC, T, sigma_A=sigma_A, alpha=alpha, q_B=q_B, beta_exp=beta_exp, **kw)

    @classmethod
    def sabr(cls, sigma0: float, rho: float, nu: float, beta: float, T: float = 1.0, **kw):
        return cls(DynamicsKind.SABR, T, sigma0=sigma0, rho=rho, nu=nu, beta=beta, **kw)

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.T * self.steps_per_year)))

    def coefficient_paths(self) -> tuple[np.ndarray, np.ndarray]:
        """(sigma_t, q_t) at the left end of every step; the first node is moved to dt."""
        n = self.n_steps
        dt = self.T / n
        t = np.arange(n) * dt
        t[0] = dt
        if self.kind is DynamicsKind.SABR:
            return np.full(n, self.sigma0), np.zeros(n)
        sig = self.sigma_A * t ** self.alpha
        if self.kind is DynamicsKind.SLN_STATIC:
            q = np.full(n, self.q)
        else:
            q = -abs(self.q_B) * t ** self.beta_exp
        return sig, q

    def to_dict(self) -> dict:
        head = {"kind": self.kind.value, "T": self.T, "steps_per_year": self.steps_per_year, "scheme": self.scheme}
        if self.kind is DynamicsKind.SLN_STATIC:
            head["sln_static"] = {"sigma_A": self.sigma_A, "alpha": self.alpha, "q": self.q}
        elif self.kind is DynamicsKind.SLN_DYNAMIC:
            head["sln_dynamic"] = {"sigma_A": self.sigma_A, "alpha": self.alpha, "q_B": self.q_B,
                                   "beta_exp": self.beta_exp}
        else:
            head["sabr"] = {"sigma0": self.sigma0, "rho": self.rho, "nu": self.nu, "beta": self.beta}
        return head

    @classmethod
    def from_dict(cls, doc: dict) -> "DynamicsSpec":
        try:
            kind = DynamicsKind(doc["kind"])
        except (KeyError, ValueError):
            raise ConfigurationError(f"dynamics 'kind' must be one of {[k.value for k in DynamicsKind]}") from None
        common = {k: doc[k] for k in ("T", "steps_per_year", "scheme") if k in doc}
        body = doc.get(kind.value)
        if not isinstance(body, dict):
            raise ConfigurationError(f"dynamics document needs a {kind.value!r} section")
        try:
            if kind is DynamicsKind.SLN_STATIC:
                return cls.sln_static(body.get("sigma_bar"), body.get("q", 0.0), sigma_A=body.get("sigma_A"),
                                      alpha=body.get("alpha", 0.0), **common)
            if kind is DynamicsKind.SLN_DYNAMIC:
                return cls.sln_dynamic(body["sigma_A"], body["alpha"], body["q_B"], body["beta_exp"], **common)
            return cls.sabr(body["sigma0"], body["rho"], body["nu"], body["beta"], **common)
        except KeyError as exc:
            raise ConfigurationError(f"{kind.value} section is missing {exc}") from None


@dataclass(frozen=True)
class RunConfig:
    n_paths: int = 100_000
    seed: int = 0
    barriers: tuple[float, ...] = (0.60, 0.65, 0.70, 0.75, 0.80, 0.90)
    antithetic: bool = True
    brownian_bridge: bool = True
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "barriers", tuple(float(b) for b in self.barriers))
        if self.n_paths < 2:
            raise ConfigurationError("n_paths must be at least 2")
        if self.antithetic and self.n_paths % 2:
            raise ConfigurationError("antithetic sampling needs an even number of paths")
        if not self.barriers or any(not 0 < b < 1 for b in self.barriers):
            raise ConfigurationError(f"barrier levels must be fractions in (0, 1), got {self.barriers}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["barriers"] = list(self.barriers)
        return d


@dataclass(frozen=True)
class BarrierStats:
    n_paths: int
    barrier_frac: float
    hits: int
    ended_below: int
    ended_above: int
    delta_hat: float
    std_err: float

    def __post_init__(self):
        if self.ended_below + self.ended_above != self.hits:
            raise ValueError("ended_below + ended_above must equal hits")


@dataclass(frozen=True)
class SimulationResult:
    dynamics: DynamicsSpec
    config: RunConfig
    stats: tuple[BarrierStats, ...]
    mean_terminal: float
    stderr_terminal: float
    clamp_rate: float
    warnings: tuple[str, ...] = ()

    def __iter__(self):
        return iter(self.stats)

    def __getitem__(self, i):
        return self.stats[i]

    def table_rows(self) -> list[dict]:
        return [
            {"barrier_level": s.barrier_frac, "hits": s.hits, "ended_below": s.ended_below,
             "ended_above": s.ended_above, "delta": s.delta_hat, "std_err": s.std_err}
            for s in self.stats
        ]

    def to_dict(self) -> dict:
        return {
            "dynamics": self.dynamics.to_dict(),
            "config": self.config.to_dict(),
            "barriers": self.table_rows(),
            "martingale": {"mean_terminal": self.mean_terminal, "stderr": self.stderr_terminal},
            "clamp_rate": self.clamp_rate,
            "warnings": list(self.warnings),
        }


# --------------------------------------------------------------------------- kernels


@njit(nogil=True, cache=True)
def _sln_paths(Z, U, sig, q, dt, barriers, use_bb, euler, x_T, hit, x_stop):
    n, steps = Z.shape
    nb = barriers.size
    sq = math.sqrt(dt)
    clamps = 0
    for p in range(n):
        f = 0.0
        for i in range(steps):
            s = sig[i]
            qq = q[i]
            dW = Z[p, i] * sq
            lv = s * (1.0 + qq * f)
            if euler:
                fn = f + lv * dW
                if qq != 0.0 and 1.0 + qq * fn <= 0.0:
                    fn = -(1.0 - 1e-12) / qq
                    clamps += 1
            elif abs(qq * s) < 1e-12:
                fn = f + lv * dW
            else:
                y = (1.0 + qq * f) * math.exp(qq * s * dW - 0.5 * qq * qq * s * s * dt)
                fn = (y - 1.0) / qq
            x0 = 1.0 + f
            x1 = 1.0 + fn
            v = lv * lv * dt
            u = U[p, i] if use_bb else 1.0
            for k in range(nb):
                if hit[p, k]:
                    continue
                b = barriers[k]
                if x1 <= b:
                    hit[p, k] = True
                    x_stop[p, k] = x1
                elif use_bb and v > 0.0 and (x0 - b) * (x1 - b) < BB_CUTOFF * v and \
                        u < math.exp(-2.0 * (x0 - b) * (x1 - b) / v):
                    hit[p, k] = True
                    x_stop[p, k] = x1
            f = fn
        x_T[p] = 1.0 + f
    return clamps


@njit(nogil=True, cache=True)
def _sabr_paths(Z1, Z2, U, sigma0, rho, nu, beta, dt, barriers, use_bb, x_T, hit, x_stop):
    n, steps = Z1.shape
    nb = barriers.size
    sq = math.sqrt(dt)
    rc = math.sqrt(max(1.0 - rho * rho, 0.0))
    for p in range(n):
        x = 1.0
        V = 0.0
        for i in range(steps):
            t = i * dt
            a = sigma0 * math.exp(nu * V - 0.5 * nu * nu * t)
            dV = Z1[p, i] * sq
            dZ = rho * dV + rc * Z2[p, i] * sq
            if x <= 0.0:
                xn = 0.0
                lv = 0.0
            elif beta == 1.0:
                lv = a * x
                xn = x * math.exp(a * dZ - 0.5 * a * a * dt)
            elif beta == 0.0:
                lv = a
                xn = x + a * dZ
            else:
                lv = a * x ** beta
                xn = max(x + lv * dZ, 0.0)
            v = lv * lv * dt
            u = U[p, i] if use_bb else 1.0
            for k in range(nb):
                if hit[p, k]:
                    continue
                b = barriers[k]
                if xn <= b:
                    hit[p, k] = True
                    x_stop[p, k] = xn
                elif use_bb and v > 0.0 and (x - b) * (xn - b) < BB_CUTOFF * v and \
                        u < math.exp(-2.0 * (x - b) * (xn - b) / v):
                    hit[p, k] = True
                    x_stop[p, k] = xn
            x = xn
            V += dV
        x_T[p] = x
    return 0


# --------------------------------------------------------------------------- driver


@dataclass
class _Block:
    x_T: np.ndarray
    hit: np.ndarray
    x_stop: np.ndarray
    clamps: int


def _block_sizes(n_paths: int, antithetic: bool) -> list[int]:
    """Split into N_BATCHES blocks (fewer for tiny runs); antithetic blocks stay even."""
    nblocks = min(N_BATCHES, n_paths // 2 if antithetic else n_paths)
    unit = 2 if antithetic else 1
    pairs = n_paths // unit
    base, extra = divmod(pairs, nblocks)
    return [(base + (1 if j < extra else 0)) * unit for j in range(nblocks)]


def _normals(gen, steps: int, m: int, antithetic: bool) -> np.ndarray:
    """Path-major normals; the second half negates the first when antithetic."""
    if not antithetic:
        return gen.standard_normal((m, steps))
    z = gen.standard_normal((m // 2, steps))
    return np.concatenate([z, -z], axis=0)


def _run_block(dyn: DynamicsSpec, cfg: RunConfig, block: int, size: int) -> _Block:
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, block])))
    steps = dyn.n_steps
    dt = dyn.T / steps
    barriers = np.asarray(cfg.barriers, dtype=float)
    x_T = np.empty(size)
    hit = np.zeros((size, barriers.size), dtype=np.bool_)
    x_stop = np.full((size, barriers.size), np.nan)
    clamps = 0
    sig, q = dyn.coefficient_paths()
    start = 0
    # chunks keep memory bounded; their order is fixed so the stream is too
    while start < size:
        m = min(MAX_CHUNK, size - start)
        if cfg.antithetic and m % 2:
            m -= 1
        sl = slice(start, start + m)
        if dyn.kind is DynamicsKind.SABR:
            Z1 = _normals(gen, steps, m, cfg.antithetic)
            Z2 = _normals(gen, steps, m, cfg.antithetic)
            U = gen.random((m, steps)) if cfg.brownian_bridge else np.empty((0, 0))
            _sabr_paths(Z1, Z2, U, dyn.sigma0, dyn.rho, dyn.nu, dyn.beta, dt, barriers,
                        cfg.brownian_bridge, x_T[sl], hit[sl], x_stop[sl])
        else:
            Z = _normals(gen, steps, m, cfg.antithetic)
            U = gen.random((m, steps)) if cfg.brownian_bridge else np.empty((0, 0))
            clamps += _sln_paths(Z, U, sig, q, dt, barriers, cfg.brownian_bridge, dyn.scheme == "euler",
                                 x_T[sl], hit[sl], x_stop[sl])
        start += m
    return _Block(x_T, hit, x_stop, clamps)


def _simulate_blocks(dyn: DynamicsSpec, cfg: RunConfig) -> list[_Block]:
    sizes = _block_sizes(cfg.n_paths, cfg.antithetic)
    if cfg.workers <= 1:
        return [_run_block(dyn, cfg, j, s) for j, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(_run_block, dyn, cfg, j, s) for j, s in enumerate(sizes)]
        return [f.result() for f in futures]


def ratio_stderr(num: np.ndarray, den: np.ndarray) -> float:
    """Batch standard error of sum(num)/sum(den) (linearised ratio estimator)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    k = num.size
    D = den.sum()
    if k < 2 or D <= 0:
        return math.inf
    r = num.sum() / D
    e = num - r * den
    return float(math.sqrt(k / (k - 1) * np.sum(e * e)) / D)


def _mean_stderr(batch_sums: np.ndarray, batch_counts: np.ndarray) -> tuple[float, float]:
    mean = float(batch_sums.sum() / batch_counts.sum())
    return mean, ratio_stderr(batch_sums, batch_counts)


def simulate(dyn: DynamicsSpec, cfg: RunConfig) -> SimulationResult:
    """Per-level barrier tallies plus the martingale diagnostic."""
    blocks = _simulate_blocks(dyn, cfg)
    return _summarise(dyn, cfg, blocks)


def _summarise(dyn, cfg, blocks) -> SimulationResult:
    levels = np.asarray(cfg.barriers)
    stats = []
    for k, b in enumerate(levels):
        below = np.array([np.count_nonzero(bl.x_T < b) for bl in blocks])
        hits = np.array([np.count_nonzero(bl.hit[:, k]) for bl in blocks])
        above = hits - below
        nb, na = int(below.sum()), int(above.sum())
        delta = (na - nb) / nb if nb > 0 else math.nan
        se = ratio_stderr(above, below) if nb > 0 else math.nan
        stats.append(BarrierStats(cfg.n_paths, float(b), int(hits.sum()), nb, na, delta, se))
    sums = np.array([bl.x_T.sum() for bl in blocks])
    counts = np.array([bl.x_T.size for bl in blocks], dtype=float)
    mean, se = _mean_stderr(sums, counts)
    clamp_rate = sum(bl.clamps for bl in blocks) / (cfg.n_paths * dyn.n_steps)
    warns = []
    if cfg.n_paths < MIN_PATHS_FOR_STATS:
        warns.append(f"only {cfg.n_paths} paths: statistics unreliable (at least {MIN_PATHS_FOR_STATS} advised)")
    if clamp_rate > CLAMP_WARN_RATE:
        warns.append(f"clamp rate {clamp_rate:.3%} of steps exceeds {CLAMP_WARN_RATE:.1%}: paths hit the support edge")
    if any(s.ended_below == 0 for s in stats):
        warns.append("some barrier levels saw no path ending below them; delta undefined there")
    for w in warns:
        warnings.warn(w, RuntimeWarning, stacklevel=3)
    return SimulationResult(dyn, cfg, tuple(stats), mean, se, clamp_rate, tuple(warns))


# --------------------------------------------------------------------------- derived quantities


@dataclass(frozen=True)
class DeltaSummary:
    delta: float
    std_err: float
    ci_low: float
    ci_high: float
    delta_uncertainty: float
    price_impact_bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def price_impact_bound(delta_uncertainty: float) -> float:
    """Relative price sensitivity bound: delta uncertainty / 20."""
    return abs(delta_uncertainty) / 20.0


def delta_and_bound(stats: BarrierStats, confidence: float = 0.95) -> DeltaSummary:
    """delta with a normal confidence interval and the implied price-impact bound."""
    if stats.ended_below <= 0:
        raise DomainError("delta undefined: no path ended below the barrier")
    delta = (stats.ended_above - stats.ended_below) / stats.ended_below
    z = float(norm.ppf(0.5 + 0.5 * confidence))
    half = z * stats.std_err if math.isfinite(stats.std_err) else math.inf
    return DeltaSummary(delta, stats.std_err, delta - half, delta + half, half, price_impact_bound(half))


def _product_barrier_run(dyn: DynamicsSpec, cfg: RunConfig, barrier_frac: float):
    run_cfg = RunConfig(cfg.n_paths, cfg.seed, (barrier_frac,), cfg.antithetic, cfg.brownian_bridge, cfg.workers)
    return _simulate_blocks(dyn, run_cfg)


def epsilon_terms(dyn: DynamicsSpec, cfg: RunConfig, spec) -> dict:
    """Breach-and-recover mass neglected by the American closed forms.

    ``eps`` is S0 E[(X_T - cap/S0)+ ; barrier hit] with ``cap`` the bonus
    level K (BC) or S0 + R (BRC), in undiscounted price units.  It is also
    reported relative to the simulated exact product value.
    """
    from .products import ProductKind

    b = spec.B / spec.S0
    c = spec.cap / spec.S0
    blocks = _product_barrier_run(dyn, cfg, b)
    eps_b, pay_b, cnt = [], [], []
    for bl in blocks:
        h = bl.hit[:, 0]
        x = bl.x_T
        excess = np.maximum(x - c, 0.0) * h
        if spec.kind is ProductKind.BC:
            pay = np.where(h, x, np.maximum(x, c))
        else:
            pay = np.where(h, np.minimum(x, c), c)
        eps_b.append(excess.sum())
        pay_b.append(pay.sum())
        cnt.append(x.size)
    eps_b, pay_b, cnt = map(np.asarray, (eps_b, pay_b, cnt))
    eps, eps_se = _mean_stderr(eps_b, cnt.astype(float))
    price, price_se = _mean_stderr(pay_b, cnt.astype(float))
    name = "eps_bc" if spec.kind is ProductKind.BC else "eps_rc"
    return {
        "name": name,
        "eps": spec.S0 * eps,
        "stderr": spec.S0 * eps_se,
        "price_mc": spec.S0 * price,
        "price_mc_stderr": spec.S0 * price_se,
        "relative": eps / price if price else math.nan,
    }


@dataclass(frozen=True)
class ConditionalDensity:
    barrier_frac: float
    edges: np.ndarray
    total: np.ndarray
    hit: np.ndarray
    not_hit: np.ndarray
    hit_mean: float
    hit_mean_stderr: float
    stop_mean: float

    def to_dict(self) -> dict:
        return {
            "barrier_frac": self.barrier_frac,
            "edges": self.edges.tolist(),
            "total": self.total.tolist(),
            "rho_BH": self.hit.tolist(),
            "rho_BN": self.not_hit.tolist(),
            "hit_mean": self.hit_mean,
            "hit_mean_stderr": self.hit_mean_stderr,
            "stop_mean": self.stop_mean,
        }


def conditional_densities(dyn: DynamicsSpec, cfg: RunConfig, bins=None) -> list[ConditionalDensity]:
    """Terminal histograms split by barrier hit, one per level.

    ``hit_mean`` is the mean of X_T over hitting paths; by optional
    stopping it equals ``stop_mean``, the mean of X at the monitoring date
    where the hit was recorded, and both approach the barrier as the
    monitoring gets finer.
    """
    blocks = _simulate_blocks(dyn, cfg)
    x_all = np.concatenate([bl.x_T for bl in blocks])
    if bins is None:
        lo, hi = float(x_all.min()), float(x_all.max())
        bins = np.linspace(lo, hi + 1e-12, 201)
    edges = np.asarray(bins, dtype=float)
    for b in cfg.barriers:
        if b not in edges:
            edges = np.sort(np.r_[edges, b])
    out = []
    for k, b in enumerate(cfg.barriers):
        h = np.concatenate([bl.hit[:, k] for bl in blocks])
        xs = np.concatenate([bl.x_stop[:, k] for bl in blocks])
        total, _ = np.histogram(x_all, edges)
        hit_counts, _ = np.histogram(x_all[h], edges)
        sums = np.array([bl.x_T[bl.hit[:, k]].sum() for bl in blocks])
        counts = np.array([np.count_nonzero(bl.hit[:, k]) for bl in blocks], dtype=float)
        if counts.sum() > 0:
            m, se = _mean_stderr(sums, counts)
            stop = float(np.nanmean(xs[h]))
        else:
            m, se, stop = math.nan, math.nan, math.nan
        out.append(ConditionalDensity(float(b), edges, total, hit_counts, total - hit_counts, m, se, stop))
    return out


def martingale_hit_gap(dyn: DynamicsSpec, cfg: RunConfig, barrier_frac: float) -> tuple[float, float]:
    """Mean of (X_T - X_stop) over hitting paths and its batch standard error (zero in expectation)."""
    blocks = _product_barrier_run(dyn, cfg, barrier_frac)
    sums = np.array([np.nansum((bl.x_T - bl.x_stop[:, 0])[bl.hit[:, 0]]) for bl in blocks])
    counts = np.array([np.count_nonzero(bl.hit[:, 0]) for bl in blocks], dtype=float)
    return _mean_stderr(sums, counts)


def reference_dynamic(T: float = 1.0, steps_per_year: int = 250, **kw) -> DynamicsSpec:
    """The time-dependent skew configuration of the reference study."""
    return DynamicsSpec.sln_dynamic(0.15, 0.124, 3.1, -0.67, T=T, steps_per_year=steps_per_year, **kw)


def reference_static(T: float = 1.0, steps_per_year: int = 250, **kw) -> DynamicsSpec:
    """Static skew -3.82 (the dynamic q at t = 0.75) with the same volatility curve."""
    return DynamicsSpec.sln_static(q=-3.82, T=T, sigma_A=0.15, alpha=0.124, steps_per_year=steps_per_year, **kw)


__all__ = [
    "BarrierStats",
    "ConditionalDensity",
    "DeltaSummary",
    "DynamicsKind",
    "DynamicsSpec",
    "RunConfig",
    "SimulationResult",
    "reference_dynamic",
    "reference_static",
    "conditional_densities",
    "delta_and_bound",
    "epsilon_terms",
    "martingale_hit_gap",
    "price_impact_bound",
    "ratio_stderr",
    "simulate",
]
