"""Scenario runners: turn a loaded configuration into result tables.

Every table carries a ``recompute`` hook that rebuilds a row from its input
columns by calling the underlying module operation again; ``--verify`` uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cavendish as cav
from .config import ScenarioConfig
from .ensemble import RngSpec, cos_gamma_convergence, cos_gamma_experiment
from .eotvos_torque import ArmMasses, TorqueScenario, torque_lever, torque_mean, torque_variance
from .geo_frames import BalanceGeometry, EotvosGeometry, equilibrium_fiber_tilt
from .noise_sensitivity import (
    SensitivityBudget,
    acceleration_resolution,
    min_detectable_G,
    r_bound_from_Gmin,
)
from .quantum_state import ArmState, BlochState
from .wep_core import (
    WepParams,
    acceleration_operator,
    form_factor_F,
    form_factor_G,
    phase_averaged_F,
    phase_averaged_G,
)


@dataclass
class ResultTable:
    name: str
    columns: tuple[str, ...]
    rows: np.ndarray
    metadata: dict[str, str] = field(default_factory=dict)
    recompute: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=float))
        if self.rows.size and self.rows.shape[1] != len(self.columns):
            raise ValueError(f"table {self.name}: {self.rows.shape[1]} columns but header has {len(self.columns)}")


def _wep(cfg: ScenarioConfig) -> WepParams:
    w = cfg["wep"]
    return WepParams(w["r1"], w["r2"], w["r_abs"], w["phi_r_deg"])


def _time_grid(section: dict) -> np.ndarray:
    if section["points"] < 1:
        raise ValueError("[time] points must be >= 1")
    if section["stop"] < section["start"]:
        raise ValueError("[time] stop must be >= start")
    return np.linspace(section["start"], section["stop"], section["points"])


def _earth(cfg: ScenarioConfig, latitude: float) -> EotvosGeometry:
    e = cfg["earth"]
    return EotvosGeometry(
        lambda_lat=float(latitude),
        eps_tilt=e["tilt_deg"],
        Omega=e["omega"],
        Omega_bar=e["omega_bar"],
        R_earth=e["earth_radius"],
        R_sun_dist=e["sun_distance"],
        g_earth=e["g"],
        G_N=e["G_N"],
        M_sun=e["sun_mass"],
        orbital_phase=e["orbital_phase_deg"],
    )


def _arm(section: dict) -> ArmState:
    return ArmState(BlochState(section["n"], section["theta_deg"], section["phi_deg"]), section["count"])


def _cavendish_cfg(cfg: ScenarioConfig) -> cav.CavendishConfig:
    c = cfg["cavendish"]
    return cav.CavendishConfig(
        m_s=c["m_s"], R_s=c["R_s"], R_t=c["R_t"], Omega_rot=c["omega_rot"],
        Theta=c["theta_deg"], m=c["m"], N=c["N"], G_N=c["G_N"],
    )


def _states(cfg: ScenarioConfig) -> list[BlochState]:
    s = cfg["state"]
    return [BlochState(s["n"], s["theta_deg"], float(phi)) for phi in s["phi_deg"]]


def _rng_spec(cfg: ScenarioConfig, seed: int | None) -> RngSpec:
    mc = cfg["montecarlo"]
    return RngSpec(mc["seed"] if seed is None else seed, mc["algorithm"])


def _checkpoints(mc: dict) -> np.ndarray:
    pts = mc["checkpoints"]
    if pts.size == 0:
        pts = np.logspace(1, math.log10(mc["samples"]), 13)
    return np.unique(np.round(pts).astype(np.int64))


def build_objects(cfg: ScenarioConfig, seed: int | None = None) -> dict:
    """Construct (and thereby validate) every domain object a scenario needs."""
    mode = cfg.mode
    if mode == "freefall":
        if not cfg["freefall"]["g"] > 0:
            raise ValueError("[freefall] g must be > 0")
        return {"params": _wep(cfg), "states": _states(cfg)}
    if mode == "eotvos":
        b = cfg["balance"]
        geos = [_earth(cfg, lat) for lat in cfg["earth"]["latitude_deg"]]
        balances = [BalanceGeometry(b["ell"], float(tt), b["phi_tilde_deg"] or 0.0) for tt in b["theta_tilde_deg"]]
        m = cfg["masses"]
        return {
            "params": _wep(cfg), "geos": geos, "balances": balances,
            "masses": ArmMasses(m["m_A"], m["m_B"]),
            "arm_A": _arm(cfg["arm_A"]), "arm_B": _arm(cfg["arm_B"]),
            "times": _time_grid(cfg["time"]),
        }
    if mode == "cavendish":
        out = {
            "params": _wep(cfg), "states": _states(cfg), "cav": _cavendish_cfg(cfg),
            "times": _time_grid(cfg["time"]),
        }
        if cfg["cavendish"]["delta_alpha_cl"] < 0:
            raise ValueError("[cavendish] delta_alpha_cl must be >= 0")
        if "budget" in cfg.present:
            bud = cfg["budget"]
            out["budget"] = SensitivityBudget(bud["torque_asd"], bud["integration_time"], bud["signal_freq"])
            if not bud["I_moment"] > 0:
                raise ValueError("[budget] I_moment must be > 0")
        return out
    if mode == "montecarlo":
        mc = cfg["montecarlo"]
        if mc["samples"] < 2:
            raise ValueError("[montecarlo] samples must be >= 2")
        if mc["bins"] < 1:
            raise ValueError("[montecarlo] bins must be >= 1")
        pts = _checkpoints(mc)
        if pts[0] < 2 or pts[-1] > mc["samples"]:
            raise ValueError("[montecarlo] checkpoints must lie in [2, samples]")
        return {"rng": _rng_spec(cfg, seed), "checkpoints": pts}
    if mode == "sweep":
        sw = cfg["sweep"]
        if sw["N"] < 1:
            raise ValueError("[sweep] N must be >= 1")
        if sw["rel_classical_noise"] < 0:
            raise ValueError("[sweep] rel_classical_noise must be >= 0")
        for n in sw["n"]:
            BlochState(float(n), 0.0)
        for theta in sw["theta_deg"]:
            BlochState(1.0, float(theta))
        for r_abs in sw["r_abs"]:
            WepParams(1.0, 1.0, float(r_abs))
        return {}
    raise ValueError(f"unknown mode {mode!r}")


def _with_context(what: str, func, *args):
    try:
        return func(*args)
    except ArithmeticError as exc:
        raise ArithmeticError(f"{exc} ({what})") from None


# -- freefall ---------------------------------------------------------------

def run_freefall(cfg: ScenarioConfig, **_) -> list[ResultTable]:
    objs = build_objects(cfg)
    p, g = objs["params"], cfg["freefall"]["g"]
    s0 = objs["states"][0]

    def row(phi: float) -> list[float]:
        s = BlochState(s0.n, s0.theta, phi)
        F, G = form_factor_F(p, s), form_factor_G(p, s)
        return [phi, F, G, g * F, g * g * G, phase_averaged_F(p, s.n, s.theta), phase_averaged_G(p, s.n, s.theta)]

    acceleration_operator(p, g)  # validates g against the operator contract
    rows = [row(s.phi) for s in objs["states"]]
    cols = ("phi", "F", "G", "mean_acceleration", "acceleration_variance", "F_phase_averaged", "G_phase_averaged")
    return [ResultTable("freefall", cols, rows, recompute=lambda r: np.array(row(r[0])))]


# -- eotvos -----------------------------------------------------------------

EOTVOS_COLUMNS = (
    "t", "latitude", "theta_tilde", "phi_tilde", "tau0_over_mu_ell", "torque_mean", "torque_variance",
)


def run_eotvos(cfg: ScenarioConfig, **_) -> list[ResultTable]:
    objs = build_objects(cfg)
    include_orbital = cfg["earth"]["include_orbital"]
    auto_tilt = cfg["balance"]["phi_tilde_deg"] is None
    fixed_tilt = cfg["balance"]["phi_tilde_deg"]
    ell = cfg["balance"]["ell"]

    def row(t: float, lat: float, tt: float, pt: float | None) -> list[float]:
        geo = _earth(cfg, lat)
        ctx = f"t={t!r}, latitude={lat!r}, theta_tilde={tt!r}"
        if pt is None:
            pt = _with_context(ctx, equilibrium_fiber_tilt, geo, t, include_orbital)
        bg = BalanceGeometry(ell, tt, pt)
        sc = TorqueScenario(geo, bg, objs["masses"], objs["params"], objs["arm_A"], objs["arm_B"], include_orbital)
        lever = _with_context(ctx, torque_lever, geo, bg, t, include_orbital)
        return [t, lat, tt, pt, lever / ell,
                _with_context(ctx, torque_mean, sc, t), _with_context(ctx, torque_variance, sc, t)]

    rows = []
    for geo in objs["geos"]:
        for bg in objs["balances"]:
            for t in objs["times"]:
                rows.append(row(float(t), geo.lambda_lat, bg.theta_tilde, None if auto_tilt else fixed_tilt))
    table = ResultTable(
        "eotvos_torque", EOTVOS_COLUMNS, rows,
        metadata={"include_orbital": str(include_orbital).lower()},
        recompute=lambda r: np.array(row(r[0], r[1], r[2], r[3])),
    )
    return [table]


# -- cavendish --------------------------------------------------------------

def run_cavendish(cfg: ScenarioConfig, **_) -> list[ResultTable]:
    objs = build_objects(cfg)
    p, c = objs["params"], objs["cav"]
    states = objs["states"]
    delta = cfg["cavendish"]["delta_alpha_cl"]
    with_qsnr = p.r1 == 1.0 and p.r2 == 1.0
    s0 = states[0]

    def row(t: float, phi: float) -> list[float]:
        s = BlochState(s0.n, s0.theta, phi)
        ctx = f"t={t!r}, phi={phi!r}"
        r_p, r_m = _with_context(ctx, cav.r_plus_minus, c, t)
        a_cl = _with_context(ctx, cav.alpha_classical, c, t)
        mean = _with_context(ctx, cav.alpha_mean, c, p, s, t)
        var = _with_context(ctx, cav.alpha_variance, c, p, s, t)
        ff_mean, ff_var = cav.alpha_far_field(c, p, s, t)
        out = [t, phi, r_p, r_m, a_cl, mean, var, ff_mean, ff_var]
        if with_qsnr:
            out.append(_with_context(ctx, cav.qsnr, c, p, s, t, delta))
        return out

    cols = ["t", "phi", "R_plus", "R_minus", "alpha_classical", "alpha_mean", "alpha_variance",
            "alpha_mean_far_field", "alpha_variance_far_field"]
    if with_qsnr:
        cols.append("qsnr")
    rows = [row(float(t), s.phi) for s in states for t in objs["times"]]
    tables = [ResultTable("cavendish", tuple(cols), rows, recompute=lambda r: np.array(row(r[0], r[1])))]

    if "budget" in objs:
        budget = objs["budget"]
        I = cfg["budget"]["I_moment"]

        def budget_row(asd: float) -> list[float]:
            b = SensitivityBudget(asd, budget.integration_time, budget.signal_freq)
            g_min = min_detectable_G(b, c, I)
            return [asd, I, acceleration_resolution(b, I), g_min,
                    r_bound_from_Gmin(g_min, 0.0, 0.0), r_bound_from_Gmin(g_min, 1.0, math.pi / 2)]

        tables.append(ResultTable(
            "sensitivity",
            ("torque_asd", "I_moment", "acceleration_resolution", "G_min", "r_bound_mixed", "r_bound_coherent"),
            [budget_row(budget.torque_asd)],
            metadata={"integration_time": repr(budget.integration_time)},
            recompute=lambda r: np.array(budget_row(r[0])),
        ))
    return tables


# -- montecarlo -------------------------------------------------------------

def _arcsine_bin_density(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Mean of ``1 / (pi sqrt(1 - x^2))`` over each bin."""
    return (np.arcsin(hi) - np.arcsin(lo)) / (math.pi * (hi - lo))


def run_montecarlo(cfg: ScenarioConfig, seed: int | None = None, **_) -> list[ResultTable]:
    objs = build_objects(cfg, seed)
    spec: RngSpec = objs["rng"]
    mc = cfg["montecarlo"]
    conv = cos_gamma_convergence(spec.generator(), objs["checkpoints"])
    exp = cos_gamma_experiment(spec.generator(), mc["samples"], mc["bins"])

    def conv_row(count: float) -> np.ndarray:
        values = np.cos(spec.generator().uniform(-math.pi, math.pi, size=int(count)))
        return np.array([count, values.mean(), values.std(ddof=1) / math.sqrt(count)])

    lo, hi = exp.bin_edges[:-1], exp.bin_edges[1:]
    width = hi - lo
    density = exp.counts / (mc["samples"] * width)
    hist = np.column_stack([lo, hi, exp.counts, density, _arcsine_bin_density(lo, hi)])

    def hist_row(r: np.ndarray) -> np.ndarray:
        again = cos_gamma_experiment(spec.generator(), mc["samples"], mc["bins"])
        idx = int(np.searchsorted(again.bin_edges, r[0]))
        return hist[idx] if np.array_equal(again.counts, exp.counts) else np.full(5, np.nan)

    meta = {"seed": str(spec.seed), "rng": spec.algorithm_id, "samples": str(mc["samples"]),
            "mean": repr(exp.mean), "stderr": repr(exp.stderr)}
    return [
        ResultTable("cos_gamma_convergence", ("count", "mean", "stderr"), conv, meta,
                    recompute=lambda r: conv_row(r[0])),
        ResultTable("cos_gamma_histogram", ("bin_low", "bin_high", "count", "density", "arcsine_density"),
                    hist, meta, recompute=hist_row),
    ]


# -- sweep ------------------------------------------------------------------

def run_sweep(cfg: ScenarioConfig, threads: int = 1, **_) -> list[ResultTable]:
    build_objects(cfg)
    sw = cfg["sweep"]
    N, rel = sw["N"], sw["rel_classical_noise"]
    rows = cav.qsnr_sweep(sw["n"], sw["theta_deg"], sw["phi_deg"], sw["r_abs"], sw["phi_r_deg"],
                          N, rel, threads=threads)

    def row(r: np.ndarray) -> np.ndarray:
        n, theta, phi, r_abs, phi_r = (float(x) for x in r[:5])
        q = cav.qsnr_relative(WepParams(1.0, 1.0, r_abs, phi_r), BlochState(n, theta, phi), N, rel)
        return np.array([n, theta, phi, r_abs, phi_r, q])

    meta = {"N": str(N), "rel_classical_noise": repr(rel)}
    return [ResultTable("qsnr_sweep", cav.QSNR_COLUMNS, rows, meta, recompute=row)]


RUNNERS = {
    "freefall": run_freefall,
    "eotvos": run_eotvos,
    "cavendish": run_cavendish,
    "montecarlo": run_montecarlo,
    "sweep": run_sweep,
}


def run(cfg: ScenarioConfig, seed: int | None = None, threads: int = 1) -> list[ResultTable]:
    return RUNNERS[cfg.mode](cfg, seed=seed, threads=threads)


def verify_indices(n_rows: int, fraction: float = 0.01) -> np.ndarray:
    """Evenly spaced row indices covering ``fraction`` of the table (at least one)."""
    if n_rows == 0:
        return np.array([], dtype=int)
    k = max(1, math.ceil(fraction * n_rows))
    return np.unique(np.linspace(0, n_rows - 1, k).round().astype(int))


def verify_table(table: ResultTable, rtol: float = 1e-9) -> list[str]:
    """Recompute a sample of rows; returns a list of mismatch descriptions."""
    problems = []
    if table.recompute is None:
        return problems
    for i in verify_indices(len(table.rows)):
        expected = np.asarray(table.recompute(table.rows[i]), dtype=float)
        got = table.rows[i]
        ok = np.isclose(got, expected, rtol=rtol, atol=1e-300, equal_nan=True)
        if not ok.all():
            bad = [table.columns[j] for j in np.flatnonzero(~ok)]
            problems.append(f"{table.name} row {i}: mismatch in {', '.join(bad)}")
    return problems
