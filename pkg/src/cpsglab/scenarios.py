"""Scenario catalog: every verification experiment the CLI can run.

Each scenario bundles a model, an experiment, and a pass/fail judgement
with pinned tolerances.  Scenario ids are stable tokens; ``list_catalog``
prints them with one-line descriptions.  Runners are deterministic given
the seed carried by the run configuration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus_eval import dcalc_apply
from .calculus_norms import (F_alpha_q, L_envelope, WeightPhiQ, b0_norm,
                             beta_function, ds_norm, fta_sup_closed,
                             fta_sup_numeric, g_sup_closed, g_sup_numeric,
                             stirling_ratio, weighted_b0_norm, xi1)
from .integral_conditions import (condition_iii_value, lyapunov_forms,
                                  mode_integral_closed, mode_integral_quadrature,
                                  plancherel_sides, q_form_quadrature)
from .kernels import (CayleyResolventKernel, OmegaSequence, ResolventKernel,
                      w_kernel)
from .norm_engine import NormCurve
from .rate_lab import (ScenarioResult, beta_from_resolvent, beta_from_smalltime,
                       cayley_identity_check, cn_decay_experiment,
                       inverse_gen_experiment, lower_bound_probe,
                       poly_decay_experiment, sector_probe)
from .spectral_models import (crandall_pazy_spectrum, diagonal_model,
                              matrix_model, polynomial_decay_spectrum,
                              sector_spectrum)


@dataclass
class ScenarioOutcome:
    verdict: str                    # pass | fail | inconclusive
    payload: dict
    curves: list = field(default_factory=list)   # (name, NormCurve, plot_info)


@dataclass(frozen=True)
class CatalogEntry:
    scenario_id: str
    description: str
    runner: Callable
    defaults: dict
    budget_seconds: float


def _worst(verdicts):
    for v in ("fail", "inconclusive"):
        if v in verdicts:
            return v
    return "pass"


def _result_entry(res: ScenarioResult):
    return res.to_json_dict()


def _curve_of(res: ScenarioResult, name: str):
    info = {"predicted_exponent": res.predicted_exponent}
    if res.fitted is not None:
        info["fitted_exponent"] = res.fitted.exponent
        info["log_constant"] = res.fitted.log_constant
        info["window"] = list(res.fitted.window)
    return (name, res.curve, info)


def _pow2_grid(lo: int, hi: int):
    return [2**j for j in range(int(lo), int(hi) + 1)]


def run_thm34_holomorphic(params, rng):
    model = crandall_pazy_spectrum(1.0, int(params["k"]))
    n_grid = _pow2_grid(params["n_lo"], params["n_hi"])
    omegas = OmegaSequence.constant(params["omega"], n_grid[-1])
    res = cn_decay_experiment(model, omegas, params["alpha"], n_grid,
                              tolerance=params["tolerance"],
                              scenario_id="thm34-holomorphic")
    return ScenarioOutcome(res.verdict, {"result": _result_entry(res)},
                           [_curve_of(res, "cayley_decay")])


def run_thm36_cp_rate(params, rng):
    model = crandall_pazy_spectrum(params["gamma"], int(params["k"]))
    n_grid = _pow2_grid(params["n_lo"], params["n_hi"])
    omegas = OmegaSequence.constant(params["omega"], n_grid[-1])
    res = cn_decay_experiment(model, omegas, params["alpha"], n_grid,
                              tolerance=params["tolerance"],
                              scenario_id="thm36-cp-rate")
    beta = 1.0 / params["gamma"]
    rate = params["alpha"] / (2.0 - beta)
    envelope = []
    for s in res.curve.samples:
        envelope.append(s.parameter**rate * s.norm
                        / L_envelope(s.parameter, params["alpha"], beta, params["eps"]))
    payload = {
        "result": _result_entry(res),
        "envelope_ratio_max": max(envelope),
        "envelope_ratio_min": min(envelope),
        "envelope_bounded": bool(max(envelope) < math.inf),
    }
    return ScenarioOutcome(res.verdict, payload, [_curve_of(res, "cayley_decay")])


def run_thm41_no_log(params, rng):
    model = crandall_pazy_spectrum(params["gamma"], int(params["k"]))
    n_grid = _pow2_grid(params["n_lo"], params["n_hi"])
    const = OmegaSequence.constant(params["omega"], n_grid[-1])
    alt = OmegaSequence.alternating(params["omega_lo"], params["omega_hi"], n_grid[-1])
    res_c = cn_decay_experiment(model, const, params["alpha"], n_grid,
                                tolerance=params["tolerance"],
                                scenario_id="thm41-no-log/constant")
    res_a = cn_decay_experiment(model, alt, params["alpha"], n_grid,
                                tolerance=params["tolerance"],
                                scenario_id="thm41-no-log/alternating")
    payload = {"constant": _result_entry(res_c), "alternating": _result_entry(res_a)}
    return ScenarioOutcome(_worst([res_c.verdict, res_a.verdict]), payload,
                           [_curve_of(res_c, "cayley_decay_constant"),
                            _curve_of(res_a, "cayley_decay_alternating")])


def run_thm42_inverse_equiv(params, rng):
    model = crandall_pazy_spectrum(params["gamma"], int(params["k"]))
    t_grid = [2.0**j for j in range(int(params["t_lo"]), int(params["t_hi"]) + 1)]
    res = inverse_gen_experiment(model, params["alpha"], t_grid,
                                 tolerance=params["tolerance"],
                                 scenario_id="thm42-inverse-equiv")
    return ScenarioOutcome(res.verdict, {"result": _result_entry(res)},
                           [_curve_of(res, "inverse_semigroup_decay")])


def run_thm23_characterizations(params, rng):
    agreement = {}
    verdicts = []
    k_beta = int(params["k"])
    for gamma in (1.0, 1.5, 2.0, 3.0):
        model = crandall_pazy_spectrum(gamma, k_beta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bs = beta_from_smalltime(model)
            br = beta_from_resolvent(model)
        diff = abs(bs.beta - br.beta)
        ok = diff <= params["beta_tol"]
        agreement[f"gamma={gamma}"] = {
            "beta_smalltime": bs.beta, "beta_resolvent": br.beta,
            "difference": diff, "ok": bool(ok),
        }
        verdicts.append("pass" if ok else "fail")

    stability = {}
    k0 = int(params["k_condition"])
    for gamma, q in ((1.0, 0.1), (1.5, 0.25), (2.0, 0.25), (3.0, 0.4)):
        beta = 1.0 / gamma
        v1 = condition_iii_value(crandall_pazy_spectrum(gamma, k0), beta, q,
                                 params["c"]).sup_value
        v2 = condition_iii_value(crandall_pazy_spectrum(gamma, 2 * k0), beta, q,
                                 params["c"]).sup_value
        drift = abs(v2 - v1) / v1
        ok = drift <= 0.01
        stability[f"gamma={gamma},q={q}"] = {"drift": drift, "ok": bool(ok)}
        verdicts.append("pass" if ok else "fail")

    divergence = {}
    for gamma, q in ((2.0, 0.4), (3.0, 0.4)):
        beta = 1.0 / gamma + 0.2
        vals = [condition_iii_value(crandall_pazy_spectrum(gamma, K), beta, q,
                                    params["c"]).sup_value
                for K in (k0, 2 * k0, 4 * k0, 8 * k0, 16 * k0)]
        growth = vals[-1] / vals[0]
        ok = growth > 2.0 and all(b > a for a, b in zip(vals, vals[1:]))
        divergence[f"gamma={gamma},q={q}"] = {"growth": growth, "ok": bool(ok)}
        verdicts.append("pass" if ok else "fail")

    payload = {"beta_agreement": agreement, "condition_stability": stability,
               "condition_divergence": divergence}
    return ScenarioOutcome(_worst(verdicts), payload, [])


def run_prop35_lower_bound(params, rng):
    model = sector_spectrum(int(params["k"]))
    n_grid = _pow2_grid(params["n_lo"], params["n_hi"])
    half = sector_probe(model, params["alpha"], params["omega"],
                        n_grid[:len(n_grid) // 2 + 1])
    full = sector_probe(model, params["alpha"], params["omega"], n_grid)
    floor = params["floor"]
    ok = full.tail_min >= floor and half.witness >= floor \
        and full.witness >= 0.5 * half.witness
    payload = {
        "witness_half_range": half.witness,
        "witness_full_range": full.witness,
        "tail_min": full.tail_min,
        "floor": floor,
        "scaled_values": list(map(float, full.scaled_values)),
    }
    return ScenarioOutcome("pass" if ok else "fail", payload, [])


def run_sec44_lower_subsequence(params, rng):
    model = crandall_pazy_spectrum(params["gamma"], int(params["k"]))
    probe = lower_bound_probe(model, params["alpha"], j_max=int(params["j_max"]))
    floor = params["floor"]
    ok = probe.tail_min >= floor and probe.tail_drift() <= 0.1
    payload = {
        "witness": probe.witness,
        "tail_min": probe.tail_min,
        "tail_drift": probe.tail_drift(),
        "rate": probe.rate,
        "floor": floor,
        "sampled_n": list(map(float, probe.sample_params)),
        "scaled_values": list(map(float, probe.scaled_values)),
    }
    return ScenarioOutcome("pass" if ok else "fail", payload, [])


def run_prop47_poly(params, rng):
    model = polynomial_decay_spectrum(params["beta"], int(params["k"]))
    out = poly_decay_experiment(model, params["alpha"],
                                tolerance=params["tolerance"])
    payload = {name: _result_entry(res) for name, res in out.items()}
    curves = [_curve_of(res, f"poly_{name}") for name, res in out.items()]
    return ScenarioOutcome(_worst([r.verdict for r in out.values()]),
                           payload, curves)


def run_thm48_equivalence(params, rng):
    eta_grid = np.concatenate((
        -np.geomspace(1e-2, params["eta_max"], 25),
        np.geomspace(1e-2, params["eta_max"], 25)))
    worst = 0.0
    diag = crandall_pazy_spectrum(2.0, 64)
    worst = max(worst, cayley_identity_check(diag, eta_grid))
    m8 = np.diag(diag.eigenvalues[:8]).astype(complex)
    m8[np.triu_indices(8, 1)] = (rng.standard_normal(28)
                                 + 1j * rng.standard_normal(28))
    worst = max(worst, cayley_identity_check(matrix_model(m8), eta_grid))
    identity_ok = worst <= params["identity_tol"]

    model = crandall_pazy_spectrum(params["gamma"], int(params["k"]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        est = beta_from_resolvent(model)
    n_grid = _pow2_grid(params["n_lo"], params["n_hi"])
    omegas = OmegaSequence.constant(1.0, n_grid[-1])
    res = cn_decay_experiment(model, omegas, 1.0, n_grid,
                              tolerance=params["gap_tol"],
                              predicted=1.0 / (2.0 - est.beta),
                              beta=est.beta,
                              scenario_id="thm48-equivalence/cayley")
    gap = abs(res.fitted.exponent - 1.0 / (2.0 - est.beta))
    equiv_ok = gap <= params["gap_tol"] and res.fitted.r_squared >= 0.98
    payload = {
        "identity_max_discrepancy": worst,
        "identity_tol": params["identity_tol"],
        "beta_resolvent": est.beta,
        "cayley_fit": _result_entry(res),
        "equivalence_gap": gap,
    }
    verdict = "pass" if (identity_ok and equiv_ok) else "fail"
    return ScenarioOutcome(verdict, payload, [_curve_of(res, "cayley_decay")])


def run_appendix_dcalc(params, rng):
    checks = {}
    s = params["s"]

    # ray-norm lower bound through the positive-axis supremum
    kex = CayleyResolventKernel(4, 1.0, 0.5, OmegaSequence.constant(0.5, 4),
                                anchor="max")
    xs = np.geomspace(1e-3, 1e3, 200001)
    sup_axis = float(np.max(np.abs(kex.value(xs))))
    lower = math.pi / 2.0**((3.0 * s + 4.0) / 2.0) * sup_axis
    val = ds_norm(kex, s, tol=1e-6).value
    checks["ray_norm_lower_bound"] = {"value": val, "bound": lower,
                                      "ok": bool(val >= lower)}

    # decay in n: n * norm stays bounded (slowly converging constant)
    def fnapp(n):
        return CayleyResolventKernel(n, 1.0, 0.5, OmegaSequence.constant(1.0, n),
                                     anchor="max")
    d8 = ds_norm(fnapp(8), s, tol=1e-6).value
    d64 = ds_norm(fnapp(64), s, tol=1e-6).value
    checks["ray_norm_scaling"] = {
        "n8": d8, "n64": d64, "scaled_n8": 8 * d8, "scaled_n64": 64 * d64,
        "ok": bool(64 * d64 <= params["scaling_slack"] * 8 * d8),
    }

    # monotone in the ray weight order
    da = ds_norm(fnapp(8), s, tol=1e-6).value
    db = ds_norm(fnapp(8), s + 1.0, tol=1e-6).value
    checks["ray_norm_monotone_in_s"] = {"at_s": da, "at_s_plus_1": db,
                                        "ok": bool(db <= da + 1e-9)}

    # integral route consistency across weight orders
    ka = CayleyResolventKernel(2, 0.5, 0.5, OmegaSequence.constant(1.0, 2),
                               anchor="max")
    model = crandall_pazy_spectrum(2.0, 4)
    x = np.full(4, 0.5, dtype=complex)
    r0 = dcalc_apply(model, ka, 0.0, x, tol=1e-6)
    r1 = dcalc_apply(model, ka, 1.0, x, tol=1e-6)
    cross = float(np.max(np.abs(r0.result_vector - r1.result_vector)))
    checks["order_consistency"] = {
        "err_s0": r0.max_componentwise_error,
        "err_s1": r1.max_componentwise_error,
        "cross_difference": cross,
        "ok": bool(max(r0.max_componentwise_error, r1.max_componentwise_error,
                       cross) <= params["eval_tol"]),
    }
    verdict = "pass" if all(c["ok"] for c in checks.values()) else "fail"
    return ScenarioOutcome(verdict, {"checks": checks}, [])


def run_norms_selftest(params, rng, audit=None):
    checks = {}
    rel_tol = params["oracle_rel_tol"]

    lam = 2.0 + 3.0j
    closed = mode_integral_closed(lam, 0.25, 0.5, 1.0)
    quad = mode_integral_quadrature(lam, 0.25, 0.5, 1.0, tol=1e-11)
    checks["mode_integral"] = {"rel_err": abs(closed - quad) / closed,
                               "ok": bool(abs(closed - quad) / closed <= rel_tol)}

    model = diagonal_model([1.0 + 2.0j, 2.0 - 1.0j, 3.0 + 0.5j])
    freq, tim, closed_p = plancherel_sides(model, 0.8, 0.3, 0.7, 2, tol=1e-11)
    worst = max(abs(freq - tim), abs(freq - closed_p)) / closed_p
    checks["plancherel"] = {"rel_err": worst, "ok": bool(worst <= rel_tol)}

    forms = lyapunov_forms(model, 0.4, 0.5, 0.5, 2.0)
    lam1 = complex(model.eigenvalues[1])
    q_quad = q_form_quadrature(lam1, 0.4, tol=1e-11)
    q_rel = abs(forms.Q_diag[1] - q_quad) / q_quad
    p_quad_expected = 1.0 / (2.0 * (0.4 + lam1.real))
    p_rel = abs(forms.P_diag[1] - p_quad_expected) / p_quad_expected
    checks["lyapunov_forms"] = {"q_rel_err": q_rel, "p_rel_err": p_rel,
                                "ok": bool(max(q_rel, p_rel) <= rel_tol)}

    sup_rel = params["sup_rel_tol"]
    gc = g_sup_closed(1.0, 8, 1.0, 1.0, 1.0)
    gn = g_sup_numeric(1.0, 8, 1.0, 1.0, 1.0)
    xj = xi1(8, 1.0, 1.0, 1.0).value
    jl = g_sup_closed(xj * (1 - 1e-12), 8, 1.0, 1.0, 1.0)
    jr = g_sup_closed(xj * (1 + 1e-12), 8, 1.0, 1.0, 1.0)
    checks["cayley_sup"] = {
        "rel_err": abs(gc - gn) / gc,
        "junction_rel": abs(jl - jr) / jl,
        "ok": bool(abs(gc - gn) / gc <= sup_rel and abs(jl - jr) / jl <= 1e-10),
    }
    fc = fta_sup_closed(2.0, 10.0, 1.0)
    fn = fta_sup_numeric(2.0, 10.0, 1.0)
    tj = 1.0 * 2.0 / 2.0
    fl = fta_sup_closed(2.0, tj * (1 - 1e-12), 1.0)
    fr = fta_sup_closed(2.0, tj * (1 + 1e-12), 1.0)
    checks["inverse_sup"] = {
        "rel_err": abs(fc - fn) / fc,
        "junction_rel": abs(fl - fr) / fl,
        "ok": bool(abs(fc - fn) / fc <= sup_rel and abs(fl - fr) / fl <= 1e-10),
    }

    stirling = {}
    ok_st = True
    for alpha in (0.5, 1.0, 1.5):
        v = stirling_ratio(1e4, alpha)
        err = abs(v - math.gamma(alpha))
        stirling[f"alpha={alpha}"] = err
        ok_st &= err <= params["stirling_tol"]
    checks["beta_asymptotics"] = {"abs_errors": stirling, "ok": bool(ok_st)}

    r = b0_norm(w_kernel(1.0, 1.0), tol=1e-9, audit=audit)
    checks["derivative_norm_unit"] = {"value": r.value,
                                      "ok": bool(abs(r.value - 1.0) <= 1e-8)}
    bound = 0.25 + 2.0 / math.sqrt(3.0)
    from .kernels import ResolventRatioKernel
    rv = weighted_b0_norm(ResolventRatioKernel(1.0, 2.0, 1.0), WeightPhiQ(0.5),
                          tol=1e-8, audit=audit)
    checks["ratio_kernel_bound"] = {"value": rv.value, "bound": bound,
                                    "ok": bool(rv.value <= bound)}

    verdict = "pass" if all(c["ok"] for c in checks.values()) else "fail"
    return ScenarioOutcome(verdict, {"checks": checks}, [])


CATALOG = [
    CatalogEntry(
        "thm34-holomorphic",
        "n-step Cayley product with one smoothing power on a sectorial "
        "(gamma=1) spectrum decays like 1/n",
        run_thm34_holomorphic,
        {"k": 2000, "alpha": 1.0, "omega": 1.0, "n_lo": 5, "n_hi": 12,
         "tolerance": 0.1},
        10.0),
    CatalogEntry(
        "thm36-cp-rate",
        "smoothing-class spectrum (gamma=2): Cayley decay exponent "
        "alpha/(2-beta) with the log-envelope ratio reported",
        run_thm36_cp_rate,
        {"gamma": 2.0, "k": 2000, "alpha": 1.0, "omega": 1.0, "n_lo": 5,
         "n_hi": 12, "eps": 0.1, "tolerance": 0.07},
        30.0),
    CatalogEntry(
        "thm41-no-log",
        "variable-step Cayley products (constant and alternating steps) hit "
        "the clean n^(-alpha/(2-beta)) rate",
        run_thm41_no_log,
        {"gamma": 2.0, "k": 2000, "alpha": 1.0, "omega": 1.0, "omega_lo": 0.5,
         "omega_hi": 2.0, "n_lo": 5, "n_hi": 12, "tolerance": 0.07},
        30.0),
    CatalogEntry(
        "thm42-inverse-equiv",
        "inverse-generator semigroup with smoothing decays like "
        "t^(-alpha/(2-beta)) exactly when the direct semigroup is in the "
        "smoothing class",
        run_thm42_inverse_equiv,
        {"gamma": 2.0, "k": 10000, "alpha": 1.0, "t_lo": 5, "t_hi": 14,
         "tolerance": 0.07},
        30.0),
    CatalogEntry(
        "thm23-characterizations",
        "small-time blowup, resolvent decay, and the weighted resolvent "
        "integral condition agree on the same smoothing parameter",
        run_thm23_characterizations,
        {"k": 100000, "k_condition": 1000, "c": 0.5, "beta_tol": 0.08},
        60.0),
    CatalogEntry(
        "prop35-lower-bound",
        "normal sector-confined spectrum: n^alpha-scaled Cayley norms stay "
        "bounded away from zero",
        run_prop35_lower_bound,
        {"k": 10000, "alpha": 1.0, "omega": 1.0, "n_lo": 3, "n_hi": 12,
         "floor": 0.05},
        15.0),
    CatalogEntry(
        "sec44-lower-subsequence",
        "k + i k^gamma family: scaled Cayley norms along the n = j^(2 gamma - 1) "
        "subsequence witness a positive limsup",
        run_sec44_lower_subsequence,
        {"gamma": 1.0, "k": 10000, "alpha": 1.0, "j_max": 64, "floor": 0.05},
        15.0),
    CatalogEntry(
        "prop47-poly",
        "spectrum hugging the imaginary axis: semigroup, inverse-generator, "
        "and Cayley decay at rates 1/beta and alpha/(2+beta)",
        run_prop47_poly,
        {"beta": 1.0, "k": 10000, "alpha": 1.0, "tolerance": 0.07},
        30.0),
    CatalogEntry(
        "thm48-equivalence",
        "boundary resolvent identity for the Cayley transform, plus "
        "round-trip: fitted Cayley exponent matches 1/(2 - fitted beta)",
        run_thm48_equivalence,
        {"gamma": 2.0, "k": 10000, "eta_max": 1000.0, "identity_tol": 1e-10,
         "gap_tol": 0.08, "n_lo": 5, "n_hi": 12},
        30.0),
    CatalogEntry(
        "appendix-dcalc",
        "ray-integral calculus: norm lower bound, 1/n scaling, weight-order "
        "monotonicity, and cross-order evaluation consistency",
        run_appendix_dcalc,
        {"s": 2.0, "scaling_slack": 1.5, "eval_tol": 1e-5},
        60.0),
    CatalogEntry(
        "norms-selftest",
        "closed forms against quadrature oracles: Gram forms, mode "
        "integrals, two-branch suprema, beta-function asymptotics",
        run_norms_selftest,
        {"oracle_rel_tol": 1e-6, "sup_rel_tol": 1e-8, "stirling_tol": 1e-3},
        30.0),
]

CATALOG_BY_ID = {e.scenario_id: e for e in CATALOG}


def list_catalog() -> str:
    lines = []
    for e in CATALOG:
        lines.append(f"{e.scenario_id:<24} {e.description}  "
                     f"[budget ~{e.budget_seconds:.0f}s]")
    return "\n".join(lines)


def run_scenario(scenario_id: str, overrides: Optional[dict] = None,
                 seed: int = 0, audit=None) -> ScenarioOutcome:
    entry = CATALOG_BY_ID.get(scenario_id)
    if entry is None:
        raise KeyError(scenario_id)
    params = dict(entry.defaults)
    for key, val in (overrides or {}).items():
        if key not in params:
            raise KeyError(f"scenario {scenario_id} has no parameter {key!r}")
        params[key] = type(params[key])(val)
    rng = np.random.default_rng(seed)
    if entry.runner is run_norms_selftest:
        return entry.runner(params, rng, audit=audit)
    return entry.runner(params, rng)
