"""Seeded experiment drivers: phase sweeps, single recoveries, coherence
studies, certificate runs and the perturbed-Fourier (EIT-like) demo.

Every trial draws its randomness from
``SeedSequence(master_seed, spawn_key=(tag, trial, s, ...))``, so per-trial
streams are independent and do not depend on the order in which trials
run.  Signals depend only on ``(trial, s)``, so the sampling schemes of a
sweep are compared on identical signals.
"""

from __future__ import annotations

import functools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import diagnostics as dg
from .errors import ConfigError, TooManyResamples
from .linops import FrameBundle, make_bundle
from .sampling import (bernoulli_mask, log_scheme, uniform_subset, variable_density,
                       virtual_frame_frequencies)
from .solver import (RecoveryProblem, SolverConfig, certificate_check, default_schedule,
                     golfing_certificate, sign_pattern, solve_analysis_l1, solve_weighted_l1)
from .transforms import build_cgo_like, build_db, build_dft, build_haar, build_ordering

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "build_geometry",
    "aggregate",
    "run_phase",
    "run_recover",
    "run_coherence",
    "run_certificate",
    "run_eit_demo",
    "run_study",
    "log_scheme_comparison",
]

STUDIES = ("phase", "recover", "coherence", "eit_demo", "certificate")
SPARSITY = ("dirac", "haar", "db2", "db3", "db4")
MEASUREMENTS = ("dft", "cgo", "identity")
WEIGHTINGS = ("coherence", "power")

# 97.5% standard normal quantile for two-sided 95% half-widths
_Z95 = 1.959963984540054

_TAGS = {"signal": 0, "pattern": 1, "noise": 2, "certificate": 3}


@dataclass
class ExperimentConfig:
    """Fully resolved experiment parameters (echoed into every report).

    ``N`` is the number of measurement rows sampled from (default: all);
    signals are ``s``-sparse in the sparsifying system with support drawn
    from its first ``M`` coefficients (default: all).  ``weighting`` picks
    the variable-density weights: exact coherence weights or
    ``(C1 + 1) / sqrt(l)``.  Constants ``C``, ``C_prime``, ``C_dprime``
    stand in for unknown universal constants.
    """

    study: str = "phase"
    grid_n: int = 64
    d: int = 1
    sparsity: str = "haar"
    levels: int | None = None
    measurement: str = "dft"
    lam: float | None = None
    cgo_decay: float = 1.0
    N: int | None = None
    M: int | None = None
    s: list = field(default_factory=lambda: [4])
    m: list = field(default_factory=lambda: [32])
    schemes: list = field(default_factory=lambda: ["uniform", "variable_density"])
    weighting: str = "coherence"
    trials: int = 10
    seed: int = 0
    epsilon: float = 0.0
    noise: float = 0.0
    success_threshold: float = 1e-4
    theta: float = 0.5
    delta_size: int = 4
    max_total_resamples: int | None = None
    alphas: list = field(default_factory=lambda: [0.25, 0.5, 1.0])
    C: float = 1.0
    C_prime: float = 1.0
    C_dprime: float = 1.0
    C1: float | None = None
    solver: dict = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigError(f"unknown study {self.study!r}", "/study")
        if self.sparsity not in SPARSITY:
            raise ConfigError(f"unknown sparsity system {self.sparsity!r}", "/sparsity")
        if self.measurement not in MEASUREMENTS:
            raise ConfigError(f"unknown measurement system {self.measurement!r}", "/measurement")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"unknown weighting {self.weighting!r}", "/weighting")
        for name in ("grid_n", "d", "trials", "jobs", "delta_size"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", f"/{name}")
        self.s = [int(v) for v in self.s]
        self.m = [int(v) for v in self.m]
        if any(v < 0 for v in self.s):
            raise ConfigError("sparsities must be >= 0", "/s")
        if any(v < 1 for v in self.m):
            raise ConfigError("measurement counts must be >= 1", "/m")
        n = self.grid_n ** self.d
        if self.N is not None and not 1 <= self.N <= n:
            raise ConfigError(f"must lie in [1, {n}]", "/N")
        if self.M is not None and not 1 <= self.M <= n:
            raise ConfigError(f"must lie in [1, {n}]", "/M")
        try:
            SolverConfig(**self.solver)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "/solver") from None

    @property
    def n(self):
        return self.grid_n ** self.d

    @property
    def n_rows(self):
        return self.N or self.n

    @property
    def support_range(self):
        return self.M or self.n

    @property
    def lam_value(self):
        """``lam`` if given, else ``84 sqrt(N)``."""
        return self.lam if self.lam is not None else 84.0 * math.sqrt(self.n_rows)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"unknown field {extra[0]!r}", f"/{extra[0]}")
        return cls(**d)


@dataclass
class ExperimentReport:
    """Config echo, per-trial records, aggregates and a diagnostics snapshot."""

    config: dict
    trials: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {"config": self.config, "trials": self.trials, "aggregates": self.aggregates,
                "diagnostics": self.diagnostics}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, allow_nan=True)

    @classmethod
    def from_dict(cls, d):
        return cls(d["config"], list(d.get("trials", [])), list(d.get("aggregates", [])),
                   dict(d.get("diagnostics", {})))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @property
    def all_converged(self):
        return all(t.get("converged", True) for t in self.trials)


# -- geometry -----------------------------------------------------------------

@dataclass(frozen=True)
class Geometry:
    U: FrameBundle
    D: FrameBundle
    F: FrameBundle


def _sparsifier(cfg: ExperimentConfig):
    n = cfg.grid_n
    if cfg.sparsity == "dirac":
        return make_bundle(np.eye(cfg.n))
    levels = cfg.levels or int(math.log2(n))
    if cfg.sparsity == "haar":
        return make_bundle(build_haar(n, levels, cfg.d))
    if cfg.d != 1:
        raise ConfigError("Daubechies systems are one-dimensional", "/sparsity")
    return make_bundle(build_db(int(cfg.sparsity[2]), n, levels))


@functools.lru_cache(maxsize=8)
def _geometry_cached(key):
    cfg = ExperimentConfig.from_dict(json.loads(key))
    ordering = build_ordering(cfg.d, cfg.n, "l2")
    F = make_bundle(build_dft(ordering, cfg.grid_n))
    if cfg.measurement == "cgo":
        U = make_bundle(build_cgo_like(ordering, cfg.grid_n, cfg.lam_value, cfg.cgo_decay, cfg.seed))
    elif cfg.measurement == "identity":
        U = make_bundle(np.eye(cfg.n))
    else:
        U = F
    return Geometry(U, _sparsifier(cfg), F)


def build_geometry(cfg: ExperimentConfig) -> Geometry:
    """Measurement, sparsifying and plain Fourier bundles for a config (cached)."""
    key = json.dumps({k: v for k, v in cfg.to_dict().items()
                      if k in ("grid_n", "d", "sparsity", "levels", "measurement", "lam", "cgo_decay",
                               "N", "seed")}, sort_keys=True)
    return _geometry_cached(key)


def _rng(cfg, tag, *key):
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(_TAGS[tag], *key)))


def _weights(cfg: ExperimentConfig, U: FrameBundle, D: FrameBundle):
    N = cfg.n_rows
    if cfg.weighting == "power":
        c1 = cfg.C1 if cfg.C1 is not None else 1.0
        return (c1 + 1.0) / np.sqrt(np.arange(1, N + 1))
    return dg.coherence_weights(U, D, N).weights


def _signal(cfg, D: FrameBundle, s, trial):
    rng = _rng(cfg, "signal", trial, s)
    x = np.zeros(D.n_rows, dtype=complex)
    if s > 0:
        support = rng.choice(cfg.support_range, size=s, replace=False)
        x[support] = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    return D.pinv_apply(x), x


def _pattern(cfg, scheme, w, s, m, trial):
    key = (trial, s, m, ["uniform", "variable_density", "bernoulli"].index(scheme))
    seed = int(np.random.SeedSequence(cfg.seed, spawn_key=(_TAGS["pattern"], *key)).generate_state(1)[0])
    N = cfg.n_rows
    if scheme == "uniform":
        return uniform_subset(N, min(m, N), seed)
    if scheme == "bernoulli":
        return bernoulli_mask(N, min(1.0, m / N), seed)
    return variable_density(w, m, seed)


def _noise(cfg, m, s, trial, scheme_idx):
    if cfg.noise <= 0:
        return np.zeros(m, dtype=complex)
    rng = _rng(cfg, "noise", trial, s, m, scheme_idx)
    e = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return cfg.noise * e / max(np.linalg.norm(e), 1e-300)


def _trial(cfg_json, scheme, s, m, trial, use_fourier=False):
    cfg = ExperimentConfig.from_dict(json.loads(cfg_json))
    geo = build_geometry(cfg)
    U = geo.F if use_fourier else geo.U
    w = _weights(cfg, geo.U, geo.D) if scheme == "variable_density" else None
    g0, _ = _signal(cfg, geo.D, s, trial)
    pat = _pattern(cfg, scheme, w, s, m, trial)
    eta = _noise(cfg, pat.m, s, trial, ["uniform", "variable_density", "bernoulli"].index(scheme))
    zeta = U.U[pat.indices] @ g0 + eta
    solver_cfg = SolverConfig(**cfg.solver)
    if pat.m == 0:
        g = np.zeros(cfg.n, dtype=complex)
        res = None
    elif scheme == "variable_density":
        prob = RecoveryProblem(U, geo.D, pat, zeta, cfg.epsilon, w)
        res = solve_weighted_l1(prob, solver_cfg)
        g = res.g
    else:
        prob = RecoveryProblem(U, geo.D, pat, zeta, cfg.epsilon)
        res = solve_analysis_l1(prob, solver_cfg)
        g = res.g
    ref = np.linalg.norm(g0)
    err = float(np.linalg.norm(g - g0) / ref) if ref > 0 else float(np.linalg.norm(g))
    return {
        "system": "fourier" if use_fourier else cfg.measurement,
        "scheme": scheme,
        "s": s,
        "m": m,
        "trial": trial,
        "seed": pat.seed,
        "error": err,
        "success": bool(err <= cfg.success_threshold),
        "iterations": 0 if res is None else res.iterations,
        "converged": True if res is None else bool(res.converged),
    }


def _run_jobs(cfg: ExperimentConfig, jobs):
    """Run trial tuples, serially or on a process pool, returning records in job order."""
    cfg_json = json.dumps(cfg.to_dict(), sort_keys=True)
    args = [(cfg_json, *j) for j in jobs]
    if cfg.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            out = list(pool.map(_trial_star, args, chunksize=max(1, len(args) // (4 * cfg.jobs))))
    else:
        out = [_trial_star(a) for a in args]
    return out


def _trial_star(a):
    return _trial(*a)


def _sort_key(t):
    return (t.get("system", ""), t["scheme"], t["s"], t["m"], t["trial"])


def aggregate(trials):
    """Success rate, median error and 95% normal half-width per (system, scheme, s, m)."""
    groups = {}
    for t in sorted(trials, key=_sort_key):
        groups.setdefault((t.get("system", ""), t["scheme"], t["s"], t["m"]), []).append(t)
    out = []
    for (system, scheme, s, m), rows in groups.items():
        n = len(rows)
        k = sum(1 for r in rows if r["success"])
        p = k / n
        out.append({
            "system": system,
            "scheme": scheme,
            "s": s,
            "m": m,
            "n_trials": n,
            "successes": k,
            "success_rate": p,
            "half_width": _Z95 * math.sqrt(p * (1 - p) / n),
            "median_error": float(np.median([r["error"] for r in rows])),
        })
    return out


def _snapshot(cfg, geo):
    mu = dg.mutual_coherence(geo.U, geo.D)
    return {"mu": mu.mu, "kappa1": geo.U.kappa, "kappa2": geo.D.kappa,
            "constants_note": "C, C_prime, C_dprime are placeholders (default 1), not known values"}


def run_phase(config: ExperimentConfig) -> ExperimentReport:
    """Success rates over the (scheme, s, m) grid with ``trials`` seeded trials each."""
    cfg = config
    geo = build_geometry(cfg)
    jobs = [(scheme, s, m, t) for scheme in cfg.schemes for s in cfg.s for m in cfg.m
            for t in range(cfg.trials)]
    trials = sorted(_run_jobs(cfg, jobs), key=_sort_key)
    diag = _snapshot(cfg, geo)
    if "variable_density" in cfg.schemes:
        w = _weights(cfg, geo.U, geo.D)
        slope, c1, resid = dg.fit_power_law(w)
        diag["weights"] = {"kind": cfg.weighting, "norm": float(np.linalg.norm(w)), "slope": slope,
                           "level": c1, "fit_rms": resid}
    return ExperimentReport(cfg.to_dict(), trials, aggregate(trials), diag)


def run_recover(config: ExperimentConfig) -> ExperimentReport:
    """Single-point recovery study (first scheme, first s and m)."""
    cfg = ExperimentConfig.from_dict({**config.to_dict(), "schemes": config.schemes[:1],
                                      "s": config.s[:1], "m": config.m[:1]})
    rep = run_phase(cfg)
    rep.config = config.to_dict()
    return rep


def coherence_constant(U: FrameBundle, D: FrameBundle, N: int, M: int):
    """Envelope constants of the two coherence decay bounds.

    ``row = max_{l <= N} sqrt(l) w_l`` and
    ``col = max_{j > M} sqrt(j) max_{l <= N} |<psi_l, phi_j>|`` (1-based);
    the fitted ``C1`` is the larger of the two.
    """
    w = dg.coherence_weights(U, D, N).weights
    row = float(np.max(np.sqrt(np.arange(1, N + 1)) * w))
    cols = np.abs(U.U[:N] @ D.U.conj().T).max(axis=0)
    j = np.arange(1, D.n_rows + 1)
    col = float(np.max(np.sqrt(j[M:]) * cols[M:])) if D.n_rows > M else 0.0
    return row, col, max(row, col)


def run_coherence(config: ExperimentConfig) -> ExperimentReport:
    """Coherence weights, their log-log decay fit and the M~(alpha) table."""
    cfg = config
    geo = build_geometry(cfg)
    N, M = cfg.n_rows, min(cfg.support_range, geo.D.n_rows)
    rep = dg.mutual_coherence(geo.U, geo.D)
    w = rep.per_pair_max[:N]
    slope, level, resid = dg.fit_power_law(w)
    decays = bool(slope < -0.1)
    row, col, c1 = coherence_constant(geo.U, geo.D, N, M)
    if cfg.C1 is not None:
        c1 = float(cfg.C1)
    k1 = geo.U.kappa
    table = []
    for a in cfg.alphas:
        tm = dg.tilde_m(geo.U, geo.D, a, N, M)
        bound = c1 ** 2 * k1 * N / a ** 2
        table.append({"alpha": a, "tilde_m": tm.value, "not_settled": tm.not_settled, "bound": bound,
                      "holds": bool(tm.value <= bound)})
    diag = {
        "mu": rep.mu,
        "family_breakdown": rep.family_breakdown,
        "weights": w.tolist(),
        "weights_norm": float(np.linalg.norm(w)),
        "slope": slope,
        "level": level,
        "fit_rms": resid,
        "decay_claimed": decays,
        "C1_row": row,
        "C1_col": col,
        "C1": c1,
        "kappa1": k1,
        "kappa2": geo.D.kappa,
        "N": N,
        "M": M,
        "tilde_m": table,
    }
    return ExperimentReport(cfg.to_dict(), [], [], diag)


def run_certificate(config: ExperimentConfig) -> ExperimentReport:
    """Golfing runs on ``delta = range(delta_size)`` with the default schedule."""
    cfg = config
    geo = build_geometry(cfg)
    delta = list(range(cfg.delta_size))
    sched = default_schedule(geo.U.kappa, geo.D.kappa, len(delta), cfg.theta)
    trials = []
    for t in range(cfg.trials):
        seed = int(np.random.SeedSequence(cfg.seed, spawn_key=(_TAGS["certificate"], t)).generate_state(1)[0])
        rec = {"scheme": "bernoulli", "s": len(delta), "m": 0, "trial": t, "seed": seed}
        sign = sign_pattern(geo.D, delta, seed=seed)
        try:
            r = golfing_certificate(geo.U, geo.D, delta, cfg.theta, sched, seed,
                                    cfg.max_total_resamples, cfg.n_rows, sign=sign)
            chk = certificate_check(geo.U, geo.D, delta, r.omega, r.rho_prime, cfg.theta, r.Q, sign)
            rec.update(found=True, success=bool(chk.all_satisfied), m=int(len(r.omega)),
                       resamples=r.golfing_iterations, conditions=chk.condition_values,
                       passed=chk.passed, error=0.0 if chk.all_satisfied else 1.0)
        except TooManyResamples as exc:
            part = exc.report
            rec.update(found=False, success=False, m=int(len(part.omega)) if part else 0,
                       resamples=part.golfing_iterations if part else [], error=1.0)
        trials.append(rec)
    diag = {"schedule": asdict(sched), "Q": sched.Q,
            "found_rate": sum(t["found"] for t in trials) / max(1, len(trials))}
    return ExperimentReport(cfg.to_dict(), trials, aggregate(trials), diag)


def run_eit_demo(config: ExperimentConfig) -> ExperimentReport:
    """Perturbed-Fourier frame versus plain Fourier on identical signals and patterns.

    Checks ``||U - F|| <= 1/lam``, ``||U|| <= 3/2`` and ``||U^-1|| <= 2``
    numerically, then runs variable-density recovery with weights
    ``(C1 + 1)/sqrt(l)`` for both frames.
    """
    base = {**config.to_dict(), "measurement": "cgo", "weighting": "power"}
    if config.C1 is None:
        fourier = ExperimentConfig.from_dict({**base, "measurement": "dft"})
        geo_f = build_geometry(fourier)
        base["C1"] = coherence_constant(geo_f.F, geo_f.D, fourier.n_rows,
                                        min(fourier.support_range, geo_f.D.n_rows))[0]
    cfg = ExperimentConfig.from_dict(base)
    geo = build_geometry(cfg)
    lam = cfg.lam_value
    diff = float(np.linalg.norm(geo.U.U - geo.F.U, 2))
    u_norm = math.sqrt(geo.U.upper_bound)
    u_inv = 1.0 / math.sqrt(geo.U.lower_bound)
    jobs = []
    for s in cfg.s:
        for m in cfg.m:
            for t in range(cfg.trials):
                jobs.append(("variable_density", s, m, t, False))
                jobs.append(("variable_density", s, m, t, True))
    trials = sorted(_run_jobs(cfg, jobs), key=_sort_key)
    aggs = aggregate(trials)
    gaps = []
    for a in aggs:
        if a["system"] == "cgo":
            b = next(x for x in aggs if x["system"] == "fourier" and x["s"] == a["s"] and x["m"] == a["m"])
            gaps.append({"s": a["s"], "m": a["m"], "cgo": a["success_rate"], "fourier": b["success_rate"],
                         "gap": b["success_rate"] - a["success_rate"]})
    diag = {
        "lambda": lam,
        "norm_U_minus_F": diff,
        "norm_U": u_norm,
        "norm_U_inv": u_inv,
        "estimates_hold": bool(diff <= 1 / lam and u_norm <= 1.5 and u_inv <= 2.0),
        "C1": cfg.C1,
        "paired": gaps,
    }
    return ExperimentReport(cfg.to_dict(), trials, aggs, diag)


def run_study(config: ExperimentConfig) -> ExperimentReport:
    return {
        "phase": run_phase,
        "recover": run_recover,
        "coherence": run_coherence,
        "eit_demo": run_eit_demo,
        "certificate": run_certificate,
    }[config.study](config)


def log_scheme_comparison(N: int, C1: float = 1.0, count: int | None = None):
    """Virtual-frame frequencies and the smooth log scheme on the same index axis.

    Returns ``(l_hat, virtual, log)`` for positive indices ``l_hat = 1..count``.
    """
    virtual = virtual_frame_frequencies(N, C1, count)
    count = len(virtual)
    l_hat = np.arange(1, count + 1)
    smooth = np.ceil(np.exp(l_hat / (C1 * C1 * N)))
    return l_hat, virtual, smooth


# -- report emission ----------------------------------------------------------

_CSV_FIELDS = ("system", "scheme", "s", "m", "trial", "seed", "error", "success", "iterations", "converged")


def _svg_polyline_chart(series, title, xlabel, ylabel, width=640, height=400, ylim=None):
    """Minimal SVG line chart: one ``<polyline>`` per ``(label, xs, ys)`` series."""
    pad = 56
    xs_all = [x for _, xs, _ in series for x in xs] or [0.0, 1.0]
    ys_all = [y for _, _, ys in series for y in ys] or [0.0, 1.0]
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = ylim if ylim else (min(ys_all), max(ys_all))
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def py(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">{xlabel}</text>',
           f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="12" '
           f'transform="rotate(-90 14 {height / 2})">{ylabel}</text>',
           f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{x0:g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" text-anchor="end">{x1:g}</text>',
           f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{y0:g}</text>',
           f'<text x="{pad - 4}" y="{pad + 4}" font-size="10" text-anchor="end">{y1:g}</text>']
    for k, (label, xs, ys) in enumerate(series):
        c = colors[k % len(colors)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline data-label="{label}" fill="none" stroke="{c}" stroke-width="2" points="{pts}"/>')
        out.append(f'<text x="{width - pad - 4}" y="{pad + 14 * (k + 1)}" font-size="11" text-anchor="end" '
                   f'fill="{c}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def success_curves_svg(report: ExperimentReport) -> str:
    """Success rate against ``m``: one polyline per (system, scheme, s)."""
    series = {}
    for a in sorted(report.aggregates, key=lambda a: (a["system"], a["scheme"], a["s"], a["m"])):
        label = a["scheme"] if not a["system"] or a["system"] == "dft" else f'{a["system"]}/{a["scheme"]}'
        if len({x["s"] for x in report.aggregates}) > 1:
            label += f' s={a["s"]}'
        xs, ys = series.setdefault(label, ([], []))
        xs.append(a["m"])
        ys.append(a["success_rate"])
    return _svg_polyline_chart([(k, *v) for k, v in series.items()], "success probability", "m",
                               "success rate", ylim=(0.0, 1.0))


def log_scheme_svg(N: int, C1: float = 1.0, count: int | None = None) -> str:
    """Log-scheme frequencies against virtual-frame frequencies."""
    l_hat, virtual, smooth = log_scheme_comparison(N, C1, count)
    return _svg_polyline_chart([("virtual frame", l_hat.tolist(), [float(v) for v in virtual]),
                                ("log scheme", l_hat.tolist(), smooth.tolist())],
                               "log scheme vs virtual frame", "virtual index", "frequency")


def emit_report(report: ExperimentReport, out_dir, formats=("json",)):
    """Write ``report.json``, ``trials.csv`` and/or ``success.svg`` plus ``log_scheme.svg``.

    Returns the list of written paths.  Raises :class:`IoError` on failure.
    """
    import csv
    import os

    from .errors import IoError

    written = []
    try:
        os.makedirs(out_dir, exist_ok=True)
        for fmt in dict.fromkeys(formats):
            if fmt == "json":
                path = os.path.join(out_dir, "report.json")
                with open(path, "w") as fh:
                    fh.write(report.to_json())
                written.append(path)
            elif fmt == "csv":
                path = os.path.join(out_dir, "trials.csv")
                with open(path, "w", newline="") as fh:
                    w = csv.DictWriter(fh, fieldnames=_CSV_FIELDS, extrasaction="ignore")
                    w.writeheader()
                    for t in report.trials:
                        w.writerow({k: t.get(k, "") for k in _CSV_FIELDS})
                written.append(path)
            elif fmt == "svg":
                path = os.path.join(out_dir, "success.svg")
                with open(path, "w") as fh:
                    fh.write(success_curves_svg(report))
                written.append(path)
                cfg = report.config
                n_rows = cfg.get("N") or cfg.get("grid_n", 64) ** cfg.get("d", 1)
                path = os.path.join(out_dir, "log_scheme.svg")
                with open(path, "w") as fh:
                    fh.write(log_scheme_svg(n_rows, cfg.get("C1") or 1.0))
                written.append(path)
            else:
                raise IoError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    return written
