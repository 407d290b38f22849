"""Verification suites behind the command-line interface.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`Report` holding pass/fail criteria and CSV tables.  Criteria are
numbered 1-10 in a fixed order so summaries from different runs line up.
"""

import configparser
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from math import pi
from pathlib import Path

import numpy as np

from .bargmann import (CoherentState, PhaseSpacePointC, SemiclassicalParam, bargmann_B, bargmann_T,
                       coherent_stats, heisenberg_check, husimi_weight)
from .grids import BoxSpec, CotangentPointP, make_direction_grid, parity_defect, sample
from .microlocal import (CutoffSpec, DecayClass, critical_points, decay_scan, degenerate_cutoff_experiment,
                         hessian_check, kappa_B, kappa_B_inv, wavefront_map)
from .phantoms import KINDS, Component, PhantomSpec, ball_husimi
from .special import plancherel_constant
from .transforms import (FilterSpec, HyperplaneQuadrature, inverse_radon, moment_residual, plancherel_check,
                         radon, radon_sinogram)

log = logging.getLogger(__name__)

CRITERIA = {
    1: "radon_gaussian_closed_form",
    2: "bargmann_identity",
    3: "plancherel",
    4: "inversion",
    5: "coherent_states",
    6: "canonical_transform",
    7: "phase_analysis",
    8: "degenerate_cutoff",
    9: "wavefront_scan",
    10: "moment_condition",
}


# --- configuration -----------------------------------------------------------

def parse_components(text):
    """Parse ``kind [center=a,b] [scale=s] [weight=w]`` entries separated by ``;``."""
    comps = []
    for chunk in text.split(";"):
        words = chunk.split()
        if not words:
            continue
        kind, kw = words[0], {}
        if kind not in KINDS:
            raise ValueError(f"unknown phantom kind {kind!r}")
        for word in words[1:]:
            key, _, val = word.partition("=")
            if key == "center":
                kw["center"] = tuple(float(v) for v in val.split(","))
            elif key in ("scale", "weight"):
                kw[key] = float(val)
            else:
                raise ValueError(f"unknown phantom field {key!r}")
        comps.append(Component(kind, **kw))
    return tuple(comps)


def format_components(comps):
    out = []
    for c in comps:
        s = c.kind
        if c.center is not None:
            s += " center=" + ",".join(repr(float(v)) for v in c.center)
        out.append(f"{s} scale={c.scale!r} weight={c.weight!r}")
    return "; ".join(out)


def _floats(text):
    return tuple(float(v) for v in str(text).replace(",", " ").split())


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of the verification suites; every field is settable from the INI file."""

    n: int = 2
    h_list: tuple = (1.0, 0.25)
    phantom: str = "gaussian"
    out: str = "out"
    threads: int = 1
    filter: str = "derivative"
    seed: int = 20240607
    # direction grid resolution at h = 1; scaled by 2/(1+h) for the identity check
    dir_resolution_n2: int = 256
    dir_resolution_n3: int = 96
    gh_nodes: int = 128
    t_half_width: float = 8.0
    t_count: int = 801
    plane_half_width: float = 6.0
    plane_step: float = 0.1
    # inversion / Plancherel grids
    inv_dir_resolution_n2: int = 128
    inv_dir_resolution_n3: int = 48
    inv_t_count_n2: int = 321
    inv_t_count_n3: int = 161
    inv_plane_half_width_n3: float = 4.5
    inv_plane_step_n3: float = 0.15
    box_half_width: float = 3.0
    box_count_n2: int = 61
    box_count_n3: int = 31
    # coherent states
    cs_x: tuple = (1.0, 2.0)
    cs_xi: tuple = (0.5, -1.0)
    cs_h: float = 0.5
    # wave-front scan
    eps0: float = 0.01
    N0: float = 3.0
    wf_h_list: tuple = (0.25, 0.2, 0.16, 0.125, 0.1)
    wf_xi: float = 1.0
    wf_angles: int = 8
    wf_dir_resolution: int = 512
    wf_t_count: int = 8001
    wf_t_half_width: float = 4.0
    # degenerate cutoff
    cutoff_h_list: tuple = (0.5, 0.25, 0.125, 0.0625)
    cutoff_x0: tuple = None
    cutoff_xi0: tuple = None
    cutoff_rho: float = None
    cutoff_dir_resolution: int = 64
    # sample counts
    radon_samples: int = 20
    kappa_samples: int = 100
    phase_samples: int = 20

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError(f"n must be 2 or 3, got {self.n}")
        for name in ("h_list", "wf_h_list", "cutoff_h_list"):
            hs = tuple(float(h) for h in getattr(self, name))
            if not hs or any(h <= 0 for h in hs):
                raise ValueError(f"{name} must contain positive values")
            if any(b >= a for a, b in zip(hs, hs[1:])):
                raise ValueError(f"{name} must be strictly decreasing")
            object.__setattr__(self, name, hs)
        for f in fields(self):
            v = getattr(self, f.name)
            if (f.name.endswith("resolution") or "resolution_" in f.name or f.name.endswith("count")
                    or "count_" in f.name) and (not isinstance(v, int) or v <= 0):
                raise ValueError(f"{f.name} must be a positive integer")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.filter not in ("derivative", "multiplier"):
            raise ValueError("filter must be 'derivative' or 'multiplier'")
        parse_components(self.phantom)

    @property
    def phantom_spec(self):
        comps = parse_components(self.phantom)
        return PhantomSpec(self.n, tuple(replace(c, center=c.center[:self.n] if c.center else None) for c in comps))

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TUPLE_FIELDS = {f.name for f in fields(ExperimentConfig) if f.type is tuple}


def load_config(path=None, **overrides):
    """Read an INI file (any section names; keys are field names) and apply overrides."""
    base = ExperimentConfig()
    values = {}
    if path is not None:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        if not cp.read(path):
            raise FileNotFoundError(f"config file not found: {path}")
        known = {f.name: f for f in fields(ExperimentConfig)}
        for section in cp.sections():
            for key, raw in cp.items(section):
                if key not in known:
                    raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
                default = getattr(base, key)
                if key in _TUPLE_FIELDS:
                    values[key] = _floats(raw) if raw.strip() else None
                elif isinstance(default, bool):
                    values[key] = cp.getboolean(section, key)
                elif isinstance(default, int):
                    values[key] = int(raw)
                elif isinstance(default, float) or (default is None):
                    values[key] = float(raw)
                else:
                    values[key] = raw.strip()
    values.update({k: v for k, v in overrides.items() if v is not None})
    return replace(base, **values)


def config_as_ini(cfg):
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["experiment"] = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            continue
        cp["experiment"][f.name] = " ".join(repr(float(a)) for a in v) if isinstance(v, tuple) else str(v)
    return cp


# --- reports -----------------------------------------------------------------

@dataclass
class Criterion:
    id: int
    value: float
    threshold: float
    passed: bool
    detail: str = ""

    @property
    def name(self):
        return CRITERIA[self.id]

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.id:2d} {self.name}: value={self.value:.3e} threshold={self.threshold:.3e} {self.detail}"


@dataclass
class Table:
    header: list
    rows: list = field(default_factory=list)


@dataclass
class Report:
    suite: str
    criteria: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self):
        return all(c.passed for c in self.criteria)

    def merge(self, other):
        self.criteria.extend(other.criteria)
        self.tables.update(other.tables)
        self.seconds += other.seconds
        return self


@contextmanager
def _pool(cfg):
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as ex:
            yield ex
    else:
        yield None


def _pmap(pool, fn, items):
    return list(pool.map(fn, items)) if pool is not None else [fn(i) for i in items]


def _timed(fn):
    def wrapper(cfg, *a, **kw):
        t0 = time.perf_counter()
        rep = fn(cfg, *a, **kw)
        rep.seconds = time.perf_counter() - t0
        log.info("%s finished in %.1f s", rep.suite, rep.seconds)
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _rng(cfg, salt):
    return np.random.default_rng([cfg.seed, salt])


def _unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def z_test_grid(n):
    """``5^n`` positions in ``[-1.5, 1.5]^n`` times ``|xi| in {0.5, 1.75, 3}`` along four directions."""
    xs = np.linspace(-1.5, 1.5, 5)
    X = np.stack(np.meshgrid(*[xs] * n, indexing="ij"), axis=-1).reshape(-1, n)
    dirs = [np.eye(n)[0], np.eye(n)[1], np.ones(n) / np.sqrt(n), np.r_[-0.6, 0.8, [0.0] * (n - 2)]]
    return np.array([x - 1j * r * d for x in X for r in (0.5, 1.75, 3.0) for d in dirs])


def _z_columns(n):
    return [f"z{j}_re" for j in range(n)] + [f"z{j}_im" for j in range(n)]


def _z_row(z):
    return list(z.real) + list(z.imag)


# --- suites ------------------------------------------------------------------

@_timed
def run_radon_closed_form(cfg):
    """Numeric Radon transform of ``exp(-pi (z-y)^2/h)`` against its closed form."""
    rep = Report("radon")
    tab = Table(["n", "h"] + _z_columns(3) + ["omega0", "omega1", "omega2", "t", "numeric_re", "numeric_im",
                                              "exact_re", "exact_im", "rel_err"])
    worst = 0.0
    rng = _rng(cfg, 1)
    for n in (2, 3):
        for h in (1.0, 0.25):
            quad = HyperplaneQuadrature(cfg.plane_half_width, min(cfg.plane_step, np.sqrt(h) / 10))
            for _ in range(cfg.radon_samples):
                z = rng.uniform(-1.5, 1.5, n) + 1j * rng.uniform(-0.75, 0.75, n)
                om = _unit(rng, n)
                t = float(rng.uniform(-1.5, 1.5))
                f = lambda y, z=z: np.exp(-pi * np.sum((z - y) ** 2, axis=-1) / h)
                num = radon(f, om, t, quad)
                ex = h ** ((n - 1) / 2) * np.exp(-pi * (z @ om - t) ** 2 / h)
                err = abs(num - ex) / abs(ex)
                worst = max(worst, err)
                pad = lambda a: list(a) + [0.0] * (3 - n)
                tab.rows.append([n, h] + pad(z.real) + pad(z.imag) + pad(om) + [t, num.real, num.imag,
                                                                                   ex.real, ex.imag, err])
    rep.tables["radon_gaussian.csv"] = tab
    rep.criteria.append(Criterion(1, worst, 1e-6, worst <= 1e-6, "max rel. error over n in {2,3}, h in {1,0.25}"))
    return rep


def identity_resolution(cfg, h):
    """Direction resolution and Gauss-Hermite node count for ``B_h`` at ``h``.

    After the t-integral the angular integrand behaves like
    ``exp(-pi (z.w)^2 / (1 + h))``, so the resolution grows like
    ``2 / (1 + h)``; the t-integrand on the shifted contour gets smoother as
    ``h`` shrinks, so the node count falls like ``sqrt(h)``.
    """
    base = cfg.dir_resolution_n2 if cfg.n == 2 else cfg.dir_resolution_n3
    res = int(8 * np.ceil(base * 2 / (1 + h) / 8))
    nodes = max(32, int(np.ceil(cfg.gh_nodes * np.sqrt(min(h, 1.0)))))
    return res, nodes


def identity_tolerance(h):
    return 1e-3 if h >= 1.0 else 5e-3


@_timed
def run_verify_identity(cfg):
    """``T_h u`` against ``B_h R u`` (odd n) or ``B_h H R u`` (even n) on the z test grid."""
    rep = Report("verify-identity")
    P = cfg.phantom_spec
    n = cfg.n
    zs = z_test_grid(n)
    tab = Table(["h"] + _z_columns(n) + ["lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_err"])
    data = P.bargmann_data()
    value, ok, details = 0.0, True, []
    with _pool(cfg) as pool:
        for h in cfg.h_list:
            res, nodes = identity_resolution(cfg, h)
            dirs = make_direction_grid(n, res)
            chunks = np.array_split(np.arange(len(zs)), max(1, cfg.threads * 4))
            rhs = np.concatenate(_pmap(pool, lambda idx: bargmann_B(data, zs[idx], h, dirs=dirs, nodes=nodes),
                                       chunks))
            if P.smooth:
                lhs = P.bargmann_T(zs, h)
                # numeric T_h where the quadrature is well conditioned (|xi|^2/h moderate)
                sel = np.sum(zs.imag ** 2, axis=1) / h <= 1.0 + 1e-12
                if np.any(sel):
                    num = bargmann_T(P, zs[sel], h)
                    cross = float(np.max(np.abs(num - lhs[sel]) / np.maximum(np.abs(lhs[sel]), 1e-300)))
                    details.append(f"h={h}: numeric T_h vs closed form {cross:.1e}")
            else:
                lhs = bargmann_T(P, zs, h)
            scale = np.abs(lhs)
            zero = np.max(scale) == 0
            err = np.zeros(len(zs)) if zero else np.abs(lhs - rhs) / np.maximum(scale, 1e-300)
            if zero:
                err = np.abs(rhs)
            worst = float(np.max(err))
            tol = identity_tolerance(h)
            ok &= worst <= tol
            value = max(value, worst / tol)
            details.append(f"h={h}: max rel. error {worst:.2e} (tol {tol:.0e}, resolution {res}, {nodes} nodes)")
            for z, a, b, e in zip(zs, lhs, rhs, err):
                tab.rows.append([h] + _z_row(z) + [a.real, a.imag, b.real, b.imag, e])
    rep.tables[f"identity_n{n}.csv"] = tab
    rep.criteria.append(Criterion(2, value, 1.0, bool(ok), f"n={n}; error/tolerance ratio; " + "; ".join(details)))
    return rep


def _inv_params(cfg, n):
    if n == 2:
        return (make_direction_grid(2, cfg.inv_dir_resolution_n2), (-cfg.t_half_width, cfg.t_half_width, cfg.inv_t_count_n2),
                HyperplaneQuadrature(cfg.plane_half_width, cfg.plane_step), BoxSpec(2, cfg.box_half_width, cfg.box_count_n2))
    return (make_direction_grid(3, cfg.inv_dir_resolution_n3), (-cfg.t_half_width, cfg.t_half_width, cfg.inv_t_count_n3),
            HyperplaneQuadrature(cfg.inv_plane_half_width_n3, cfg.inv_plane_step_n3),
            BoxSpec(3, cfg.box_half_width, cfg.box_count_n3))


@_timed
def run_plancherel(cfg):
    """``(2 pi)^{n-1} int u v`` against the hyperplane-space pairing for the configured phantom."""
    rep = Report("plancherel")
    n = cfg.n
    P = cfg.phantom_spec
    dirs, t_spec, quad, _ = _inv_params(cfg, n)
    box = BoxSpec(n, 6.0, 121 if n == 2 else 61)
    with _pool(cfg) as pool:
        res = plancherel_check(P, P, n, dirs, t_spec, box, quad, FilterSpec.from_cli(n, cfg.filter).mode, pool)
    exact = plancherel_constant(n) * 2 ** (-n / 2)
    lhs_err = abs(res.lhs - exact) / exact
    unit_gauss = len(P.components) == 1 and P.components[0].kind == "gaussian" and P.components[0].scale == 1.0 \
        and P.components[0].weight == 1.0
    ok = res.rel_gap <= 1e-4 and (lhs_err <= 1e-8 or not unit_gauss)
    rep.tables[f"plancherel_n{n}.csv"] = Table(["n", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "rel_gap", "lhs_exact"],
                                               [[n, res.lhs.real, res.lhs.imag, res.rhs.real, res.rhs.imag, res.rel_gap,
                                                 exact if unit_gauss else float("nan")]])
    detail = f"n={n}; lhs={res.lhs.real:.10g}"
    if unit_gauss:
        detail += f"; lhs vs (2pi)^(n-1) 2^(-n/2): {lhs_err:.1e}"
    rep.criteria.append(Criterion(3, res.rel_gap, 1e-4, bool(ok), detail))
    return rep


@_timed
def run_invert(cfg):
    """Forward Radon transform by quadrature, filtered backprojection, and the moment condition."""
    rep = Report("invert")
    n = cfg.n
    P = cfg.phantom_spec
    dirs, t_spec, quad, box = _inv_params(cfg, n)
    with _pool(cfg) as pool:
        U = radon_sinogram(P, dirs, t_spec, quad, pool)
    rec = inverse_radon(U, n, box, FilterSpec.from_cli(n, cfg.filter).mode)
    truth = sample(P, box)
    nt = np.linalg.norm(truth.values)
    err = float(np.linalg.norm(rec.values - truth.values) / nt) if nt > 0 else float(np.linalg.norm(rec.values))
    tol = 1e-3 if n == 2 else 1e-2
    rep.criteria.append(Criterion(4, err, tol, err <= tol, f"n={n}; rel. L2 error on {box.count}^{n} grid; "
                                                             f"parity defect {parity_defect(U):.1e}"))
    pts = truth.points().reshape(-1, n)
    rep.tables[f"inversion_n{n}.csv"] = Table([f"x{j}" for j in range(n)] + ["recon", "truth"],
                                              [list(p) + [r.real, t.real] for p, r, t in
                                               zip(pts, rec.values.ravel(), truth.values.ravel())])
    mres = [moment_residual(U, k) for k in (0, 1, 2)]
    worst = max(mres)
    rep.tables[f"moments_n{n}.csv"] = Table(["k", "residual"], [[k, r] for k, r in enumerate(mres)])
    rep.criteria.append(Criterion(10, worst, 1e-6, worst <= 1e-6, f"n={n}; residuals k=0,1,2: "
                                  + ", ".join(f"{r:.1e}" for r in mres)))
    return rep


@_timed
def run_heisenberg(cfg):
    """Coherent-state statistics and the Heisenberg equality."""
    rep = Report("heisenberg")
    n = cfg.n
    x = np.resize(np.asarray(cfg.cs_x, float), n)
    xi = np.resize(np.asarray(cfg.cs_xi, float), n)
    h = cfg.cs_h
    cs = CoherentState(PhaseSpacePointC(x, xi), SemiclassicalParam(h))
    st = coherent_stats(cs)
    bound = n * pi * h
    errs = {
        "norm": abs(st.norm - 1),
        "mean_pos": float(np.max(np.abs(st.mean_pos - x))),
        "mean_freq": float(np.max(np.abs(st.mean_freq - xi))),
        "var_pos": abs(st.var_pos - bound),
        "var_freq": abs(st.var_freq - bound),
        "product": abs(st.product - bound),
    }
    tols = {"norm": 1e-8, "mean_pos": 1e-8, "mean_freq": 1e-8, "var_pos": 1e-6, "var_freq": 1e-6, "product": 1e-6}
    ok = all(errs[k] <= tols[k] for k in errs)
    step = np.sqrt(h) / 16
    box = BoxSpec(n, 8 * np.sqrt(h), 2 * int(np.ceil(8 * np.sqrt(h) / step)) + 1, tuple(x))
    hz = heisenberg_check(cs, h, box)
    ok &= hz.ok
    rep.tables[f"coherent_n{n}.csv"] = Table(["quantity", "value", "expected", "abs_err", "tol"], [
        ["norm", st.norm, 1.0, errs["norm"], tols["norm"]],
        *[[f"mean_pos_{j}", st.mean_pos[j], x[j], abs(st.mean_pos[j] - x[j]), 1e-8] for j in range(n)],
        *[[f"mean_freq_{j}", st.mean_freq[j], xi[j], abs(st.mean_freq[j] - xi[j]), 1e-8] for j in range(n)],
        ["var_pos", st.var_pos, bound, errs["var_pos"], 1e-6],
        ["var_freq", st.var_freq, bound, errs["var_freq"], 1e-6],
        ["product", st.product, bound, errs["product"], 1e-6],
    ])
    worst = max(errs[k] / tols[k] for k in errs)
    rep.criteria.append(Criterion(5, worst, 1.0, bool(ok), f"n={n}, h={h}; worst error/tolerance ratio; "
                                  + ", ".join(f"{k}={v:.1e}" for k, v in errs.items())))
    return rep


@_timed
def run_kappa(cfg):
    """Round trips of the canonical transform and the phase analysis at random points."""
    rep = Report("kappa")
    rng = _rng(cfg, 6)
    tab = Table(["n", "x", "xi", "omega", "t", "eta", "tau", "roundtrip_err", "inverse_err"])
    worst = 0.0
    on_lambda = True
    for i in range(cfg.kappa_samples):
        n = 2 + i % 2
        x = rng.normal(size=n)
        xi = rng.normal(size=n) * 2
        p, q = kappa_B_inv(x, xi)
        target = np.r_[x - 1j * xi]
        e1 = max(float(np.max(np.abs(kappa_B(r).z - target))) for r in (p, q))
        e1 = max(e1, max(float(np.max(np.abs(kappa_B(r).zeta_dual - 2 * pi * xi))) for r in (p, q)))
        # start on the sinogram side
        om = _unit(rng, n)
        eta = rng.normal(size=n)
        eta -= (eta @ om) * om
        s = CotangentPointP.from_fiber(om, rng.normal(), eta, rng.uniform(0.2, 2.0) * rng.choice([-1, 1]))
        lam = kappa_B(s)
        on_lambda &= np.allclose(lam.zeta_dual, -2 * pi * lam.z.imag, atol=1e-10)
        back = kappa_B_inv(lam.x, lam.xi)
        e2 = min(_cot_dist(back[0], s), _cot_dist(back[1], s))
        worst = max(worst, e1, e2)
        tab.rows.append([n, " ".join(map(repr, x)), " ".join(map(repr, xi)), " ".join(map(repr, p.omega)), p.t,
                         " ".join(map(repr, p.eta)), p.tau, e1, e2])
    rep.tables["kappa.csv"] = tab
    rep.criteria.append(Criterion(6, worst, 1e-10, bool(worst <= 1e-10 and on_lambda),
                                  f"{cfg.kappa_samples} points, both directions"))
    rep.merge(run_phase(cfg))
    return rep


def _cot_dist(a, b):
    return max(float(np.max(np.abs(a.omega - b.omega))), abs(a.t - b.t),
               float(np.max(np.abs(a.eta - b.eta))), abs(a.tau - b.tau))


@_timed
def run_phase(cfg):
    """Critical points, Hessians and the mixed determinant at random ``(x, xi)``."""
    rep = Report("phase")
    rng = _rng(cfg, 7)
    tab = Table(["n", "x", "xi", "grad_norm", "eigen_min", "det_re", "det_im", "det_rel_err",
                 "degenerate_eig_absmin", "degenerate_eig_min"])
    ok = True
    g_worst = d_worst = deg_worst = 0.0
    e_min = np.inf
    for i in range(cfg.phase_samples):
        n = 2 + i % 2
        x = rng.normal(size=n)
        xi = rng.normal(size=n) * 1.5
        cp = critical_points(x, xi)
        hr = hessian_check(x, xi)
        g_worst = max(g_worst, cp.grad_norm)
        d_worst = max(d_worst, hr.det_rel_err)
        e_min = min(e_min, hr.eigen_min)
        ok &= cp.grad_norm <= 1e-8 and hr.eigen_min > 0 and hr.det_rel_err <= 1e-6
        if n == 3:
            # the degenerate set has a flat direction only when it is a curve on S^2
            deg_worst = max(deg_worst, hr.degenerate_eigen_absmin)
            ok &= hr.degenerate_eigen_absmin <= 1e-6
        else:
            ok &= hr.degenerate_eigen_min < 0
        tab.rows.append([n, " ".join(map(repr, x)), " ".join(map(repr, xi)), cp.grad_norm, hr.eigen_min,
                         hr.det_zzeta.real, hr.det_zzeta.imag, hr.det_rel_err, hr.degenerate_eigen_absmin,
                         hr.degenerate_eigen_min])
    rep.tables["phase.csv"] = tab
    rep.criteria.append(Criterion(7, max(g_worst, d_worst, deg_worst), 1e-6, bool(ok),
                                  f"grad<= {g_worst:.1e}, min eigenvalue {e_min:.2f}, det rel. err {d_worst:.1e}, "
                                  f"degenerate |eig|min (n=3) {deg_worst:.1e}"))
    return rep


@_timed
def run_cutoff(cfg):
    """Decay of ``B_h(chi U)`` near the degenerate critical set."""
    rep = Report("cutoff-experiment")
    n = cfg.n
    x0 = cfg.cutoff_x0 or (0.0,) * n
    xi0 = cfg.cutoff_xi0 or (0.0,) * (n - 1) + (2.0,)
    spec = CutoffSpec(tuple(x0[:n]), tuple(xi0[:n]), cfg.cutoff_rho)
    P = cfg.phantom_spec
    dirs = make_direction_grid(n, cfg.cutoff_dir_resolution)
    U = P.sinogram(dirs, (-cfg.t_half_width, cfg.t_half_width, cfg.t_count))
    with _pool(cfg) as pool:
        res = degenerate_cutoff_experiment(U, spec, cfg.cutoff_h_list, pool)
    rep.tables[f"cutoff_n{n}.csv"] = Table(["h", "sup_weighted_magnitude"],
                                           [[h, m] for h, m in zip(res.h_list, res.sup_magnitudes)])
    rep.criteria.append(Criterion(8, res.measured_rate, 0.9 * res.bound_rate, res.ok,
                                  f"n={n}; bound pi|xi0|^2/8 = {res.bound_rate:.4f}; rho={spec.rho:.3g}, "
                                  f"T0={spec.T0:.3g}, T1={spec.T1:.3g}"))
    return rep


def wf_ring(cfg):
    """Scan points on the unit circle: conormal (both signs), tangential, interior and exterior."""
    pts = []
    r = cfg.wf_xi
    for k in range(cfg.wf_angles):
        th = 2 * pi * k / cfg.wf_angles
        nu = np.array([np.cos(th), np.sin(th)])
        ta = np.array([-nu[1], nu[0]])
        pts += [(nu, r * nu, True), (nu, -r * nu, True), (nu, r * ta, False),
                (0.4 * nu, r * nu, False), (1.5 * nu, r * nu, False)]
    return pts


@_timed
def run_wf_disk(cfg):
    """Decay scans for the unit-disk indicator (object and sinogram side) and a Gaussian control."""
    rep = Report("wf-scan")
    if cfg.n != 2:
        raise ValueError("the wave-front scan is defined for n = 2")
    from .phantoms import unit_disk, gaussian
    disk = unit_disk()
    dirs = make_direction_grid(2, cfg.wf_dir_resolution)
    t_spec = (-cfg.wf_t_half_width, cfg.wf_t_half_width, cfg.wf_t_count)
    HRdisk = disk.sinogram(dirs, t_spec)
    obj_side = lambda x, xi, h: ball_husimi(x, xi, h)
    pts = wf_ring(cfg)
    hs = cfg.wf_h_list
    tab = Table(["side", "x0", "x1", "xi0", "xi1", "h", "magnitude", "slope", "class", "expected"])

    def scan(item):
        x, xi, conormal = item
        a = decay_scan(obj_side, x, xi, hs, cfg.eps0, cfg.N0)
        det = kappa_B_inv(x, xi)[0]
        (xs, xis), = wavefront_map([det])
        b = decay_scan(HRdisk, xs, xis, hs, cfg.eps0, cfg.N0)
        return a, b, conormal

    with _pool(cfg) as pool:
        results = _pmap(pool, scan, pts)
    correct = agree = 0
    for a, b, conormal in results:
        want = DecayClass.SLOW if conormal else None
        good_a = a.classification is DecayClass.SLOW if conormal else a.classification is not DecayClass.SLOW
        good_b = b.classification is DecayClass.SLOW if conormal else b.classification is not DecayClass.SLOW
        correct += good_a and good_b
        agree += (a.classification is DecayClass.SLOW) == (b.classification is DecayClass.SLOW)
        exp = "slow" if want else "decaying"
        for side, prof in (("object", a), ("sinogram", b)):
            for h, m in prof.samples:
                tab.rows.append([side, *prof.point[0], *prof.point[1], h, m, prof.fitted_rate,
                                 prof.classification.value, exp])
    # Gaussian control on both sides
    g = gaussian(2)
    g_obj = lambda x, xi, h: husimi_weight(g, x, xi, h)
    gsino = g.sinogram(dirs, t_spec)
    g_ok = 0
    gpts = [(x, xi) for x, xi, _ in pts[::2]]

    def gscan(item):
        x, xi = item
        a = decay_scan(g_obj, x, xi, hs, cfg.eps0, cfg.N0)
        b = decay_scan(gsino, x, xi, hs, cfg.eps0, cfg.N0)
        return a, b

    with _pool(cfg) as pool:
        gres = _pmap(pool, gscan, gpts)
    for a, b in gres:
        g_ok += a.classification is DecayClass.EXPONENTIAL and b.classification is DecayClass.EXPONENTIAL
        for side, prof in (("gaussian_object", a), ("gaussian_sinogram", b)):
            for h, m in prof.samples:
                tab.rows.append([side, *prof.point[0], *prof.point[1], h, m, prof.fitted_rate,
                                 prof.classification.value, "exponential_decay"])
    rep.tables["wf_scan.csv"] = tab
    frac_agree = agree / len(results)
    frac_correct = correct / len(results)
    ok = frac_correct == 1.0 and frac_agree >= 0.9 and g_ok == len(gres)
    rep.criteria.append(Criterion(9, frac_agree, 0.9, bool(ok),
                                  f"{len(results)} disk points: {frac_correct:.0%} classified as expected on both "
                                  f"sides, {frac_agree:.0%} agree through wavefront_map; Gaussian control "
                                  f"{g_ok}/{len(gres)} exponential"))
    return rep


@_timed
def run_transform(cfg):
    """Tabulate ``T_h u`` and ``B_h`` of the matching sinogram data on the z test grid, plus the Radon check."""
    rep = Report("transform")
    P = cfg.phantom_spec
    n = cfg.n
    zs = z_test_grid(n)
    tab = Table(["h"] + _z_columns(n) + ["T_re", "T_im", "T_weighted", "B_re", "B_im", "B_weighted"])
    for h in cfg.h_list:
        res, nodes = identity_resolution(cfg, h)
        dirs = make_direction_grid(n, res)
        weight = np.exp(-pi * np.sum(zs.imag ** 2, axis=1) / h)
        T = P.bargmann_T(zs, h) if P.smooth else bargmann_T(P, zs, h)
        if P.smooth:
            B = bargmann_B(P.bargmann_data(), zs, h, dirs=dirs, nodes=nodes)
        else:
            B = bargmann_B(P.sinogram(dirs, (-cfg.t_half_width, cfg.t_half_width, cfg.t_count)), zs, h)
        Tw, Bw = np.abs(T) * weight, np.abs(B) * weight
        for z, a, aw, b, bw in zip(zs, T, Tw, B, Bw):
            tab.rows.append([h] + _z_row(z) + [a.real, a.imag, aw, b.real, b.imag, bw])
    rep.tables[f"transform_n{n}.csv"] = tab
    rep.merge(run_radon_closed_form(cfg))
    return rep


SUITES = {
    "transform": run_transform,
    "verify-identity": run_verify_identity,
    "plancherel": run_plancherel,
    "invert": run_invert,
    "heisenberg": run_heisenberg,
    "wf-scan": run_wf_disk,
    "kappa": run_kappa,
    "cutoff-experiment": run_cutoff,
}


# --- output ------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


PLOT_SCRIPT = '''"""Plot weighted magnitude against 1/h from wf_scan.csv (requires matplotlib)."""
import csv
import math
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "wf_scan.csv"
curves = defaultdict(list)
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        key = (row["side"], row["x0"], row["x1"], row["xi0"], row["xi1"], row["expected"])
        curves[key].append((1 / float(row["h"]), max(float(row["magnitude"]), 1e-300)))
fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
for (side, *_, expected), pts in sorted(curves.items()):
    ax = axes[0] if side.endswith("object") else axes[1]
    pts.sort()
    ax.semilogy([p[0] for p in pts], [p[1] for p in pts], color="C3" if expected == "slow" else "C0", lw=0.8)
for ax, title in zip(axes, ("object side (T_h)", "sinogram side (B_h)")):
    ax.set_xlabel("1/h")
    ax.set_title(title)
axes[0].set_ylabel("weighted magnitude")
fig.tight_layout()
fig.savefig("wf_scan.png", dpi=120)
'''


def emit_outputs(report, out_dir, cfg=None):
    """Write CSV tables, ``summary.json``, the config used and a plot script into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    for name, tab in sorted(report.tables.items()):
        path = out / name
        try:
            with path.open("w", newline="") as fh:
                fh.write(",".join(tab.header) + "\n")
                for row in tab.rows:
                    fh.write(",".join(_cell(v) for v in row) + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    summary = {
        "suite": report.suite,
        "passed": report.passed,
        "criteria": [
            {"id": c.id, "name": c.name, "value": c.value, "threshold": c.threshold, "passed": bool(c.passed),
             "detail": c.detail}
            for c in sorted(report.criteria, key=lambda c: c.id)
        ],
    }
    path = out / "summary.json"
    path.write_text(json.dumps(summary, indent=2) + "\n")
    written.append(path)
    if cfg is not None:
        path = out / "config.ini"
        with path.open("w") as fh:
            config_as_ini(cfg).write(fh)
        written.append(path)
    if "wf_scan.csv" in report.tables:
        path = out / "plot_wf_scan.py"
        path.write_text(PLOT_SCRIPT)
        written.append(path)
    return written
