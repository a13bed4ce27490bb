"""Command-line verification runner.

    pformed <command> --scenario PATH [--seed N] [--quad-order K] [--h STEP] [--json-out PATH]

Commands: identities, energy, force, reduce-p0, reduce-p1, all.  The report
is JSON with ``"schema": 1``; the exit status is 0 iff every check passes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Callable, Iterable

import numpy as np

from . import checks as C
from . import r3
from .checks import Check, guarded
from .ed import energy, energy_under_motion, maxwell_residual, traction
from .flows import positive_jacobian_report, sample_points
from .force import (
    electrostatic_force_terms,
    force,
    magnetostatic_force_terms,
    magnetostatic_pointwise_check,
    magnetostatic_vector_density,
    transported_energy_oracle_p0,
    transported_energy_oracle_p1,
    udot_printed_density,
)
from .poly import evaluate_many
from .regions import stokes_residual
from .scenario import Scenario, ScenarioError, load_scenario

SCHEMA = 1
DEFAULT_SEED = 42
COMMANDS = ("identities", "energy", "force", "reduce-p0", "reduce-p1", "all")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / (1.0 + max(abs(a), abs(b)))


def _check(sc: Scenario, name: str, residual: float, default_tol: float, **kw) -> Check:
    return Check(name, float(residual), sc.tolerance(name, default_tol), **kw)


# -- scenario checks -------------------------------------------------------------

def identity_checks(sc: Scenario, seed: int) -> list[Check]:
    out: list[Check] = []
    for key, suite in C.IDENTITY_SUITES.items():
        out += guarded(f"{key}.suite", 0.0, lambda suite=suite: suite(seed=seed))
    out += guarded("scenario.maxwell_structural", 1e-12, lambda: _maxwell(sc))
    return out


def _maxwell(sc: Scenario) -> list[Check]:
    dF, dJ = maxwell_residual(sc.system)
    return [_check(sc, "scenario.maxwell_structural", max(dF, dJ), 1e-12, residuals={"dF": dF, "dJ": dJ})]


def energy_checks(sc: Scenario) -> list[Check]:
    def run() -> list[Check]:
        q = sc.energy_rule()
        rep = energy(sc.system, sc.region, q)
        out = [_check(sc, "energy.route_agreement", rep.max_residual() / rep.scale, 1e-9,
                      routes=rep.as_dict()["routes"], residuals=rep.residuals, detail={"quad_order": q.order})]
        sigma = traction(sc.system)
        out.append(_check(sc, "energy.stokes", stokes_residual(sigma, sc.region, q) / rep.scale, 1e-10))
        mq = sc.motion_rule()
        at_zero = energy_under_motion(sc.system, sc.region, sc.motion, 0.0, mq)
        out.append(_check(sc, "energy.transported_at_zero", _rel(at_zero, rep.volume), 1e-9,
                          routes={"volume": rep.volume, "transported_t0": at_zero}))
        return out

    return guarded("energy.route_agreement", 1e-9, run) + guarded("scenario.maxwell_structural", 1e-12,
                                                                  lambda: _maxwell(sc))


def force_checks(sc: Scenario) -> list[Check]:
    def run() -> list[Check]:
        q = sc.force_rule()
        rep = force(sc.system, sc.region, sc.w, q, motion=sc.motion, h=sc.h)
        d = rep.as_dict()
        out = [
            _check(sc, "force.cartan_vs_alt", rep.residuals["cartan-alt"] / rep.scale, 1e-9,
                   routes=d["routes"], residuals=d["residuals"]),
            _check(sc, "force.cartan_vs_boundary", rep.residuals["cartan-boundary"] / rep.scale, 1e-9),
            _check(sc, "force.cartan_vs_split", rep.residuals["cartan-split"] / rep.scale, 1e-9),
            _check(sc, "force.cartan_vs_fd", rep.residuals["cartan-fd"], 1e-5,
                   detail={"h": sc.h, "fd_steps": rep.fd_steps}),
            _check(sc, "force.fd_order", max(0.0, C.MIN_ORDER - rep.fd_order), 0.0,
                   detail={"order": rep.fd_order, "required": C.MIN_ORDER}),
        ]
        pts = sample_points(sc.n)
        worst, bad = math.inf, 0
        for t in (sc.h, -sc.h):
            m, k = positive_jacobian_report(sc.motion.at(t), pts)
            worst, bad = min(worst, m), bad + k
        out.append(_check(sc, "flows.jacobian_positive_at_samples", float(bad), 0.0,
                          detail={"min_det": worst, "steps": [sc.h, -sc.h]}))
        return out

    return guarded("force.cartan_vs_alt", 1e-9, run)


def _require_r3(sc: Scenario, p: int, name: str) -> None:
    if sc.n != 3 or sc.p != p:
        raise ScenarioError(f"{name} requires n = 3 and p = {p}, scenario has n = {sc.n}, p = {sc.p}")


def reduce_p0_checks(sc: Scenario) -> list[Check]:
    def run() -> list[Check]:
        _require_r3(sc, 0, "reduce-p0")
        D, alpha = sc.proxies["D"], sc.system.alpha[()]
        q = sc.force_rule()
        cartan = force(sc.system, sc.region, sc.w, q).general_cartan
        pos = electrostatic_force_terms(D, alpha, sc.w, sc.region, q, convention="+grad")
        neg = electrostatic_force_terms(D, alpha, sc.w, sc.region, q, convention="-grad")
        terms = ("charge_term", "dipole_term", "stress_term")
        pos_sum, neg_sum = sum(pos[t] for t in terms), sum(neg[t] for t in terms)
        scale = 1.0 + max(abs(pos_sum), abs(cartan))
        out = [
            _check(sc, "reduce.electrostatic_stress_boundary",
                   max(abs(pos_sum - pos["boundary_form"]), abs(neg_sum - neg["boundary_form"])) / scale, 1e-9,
                   routes={"plus_grad": pos, "minus_grad": neg}),
            _check(sc, "reduce.electrostatic_vs_cartan", _rel(pos_sum, cartan), 1e-9,
                   routes={"terms_plus_grad": pos_sum, "general_cartan": cartan}),
            _check(sc, "reduce.electrostatic_sign_map", _rel(neg_sum, -cartan), 1e-9,
                   routes={"terms_minus_grad": neg_sum, "minus_general_cartan": -cartan}),
        ]
        mq = sc.motion_rule()
        worst, routes = 0.0, {}
        for t in (0.0, sc.h, -sc.h):
            a = transported_energy_oracle_p0(D, alpha, sc.region, sc.motion, t)
            b = energy_under_motion(sc.system, sc.region, sc.motion, t, mq)
            worst = max(worst, _rel(a, b))
            routes[f"t={t:.6g}"] = {"oracle": a, "pullback": b}
        out.append(_check(sc, "reduce.transported_p0", worst, 1e-8, routes=routes))
        return out

    return guarded("reduce.electrostatic_stress_boundary", 1e-9, run)


def uniform_field_parameters(sc: Scenario) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """(B, J, w) when A = 1/2 B x X, H = 1/2 J x X and w are uniform; else None."""
    H, A, w = sc.proxies["H"], sc.proxies["alpha_sharp"], sc.w
    if not all(c.is_constant() for c in w):
        return None
    B, J = r3.curl(A), r3.curl(H)
    if not all(c.is_constant() for c in (*B, *J)):
        return None
    X = r3.position(3)
    if r3.vector_residual(A, r3.cross(B, X) * 0.5) > 0 or r3.vector_residual(H, r3.cross(J, X) * 0.5) > 0:
        return None
    const = lambda v: np.array([c.constant_term() for c in v])  # noqa: E731
    return const(B), const(J), const(w)


def reduce_p1_checks(sc: Scenario) -> list[Check]:
    def run() -> list[Check]:
        _require_r3(sc, 1, "reduce-p1")
        H, A, w = sc.proxies["H"], sc.proxies["alpha_sharp"], sc.w
        q = sc.force_rule()
        pts = sample_points(3)
        terms = magnetostatic_force_terms(H, A, w, sc.region, q)
        cartan = force(sc.system, sc.region, w, q).general_cartan
        vec, printed = evaluate_many([magnetostatic_vector_density(H, A, w), udot_printed_density(H, A, w)], pts)
        out = [
            _check(sc, "reduce.magnetostatic_pointwise", magnetostatic_pointwise_check(H, A, w, pts), 1e-9),
            _check(sc, "reduce.magnetostatic_udot_printed", float(np.max(np.abs(vec - printed))), 1e-9),
            _check(sc, "reduce.magnetostatic_total_vs_cartan", _rel(terms["total"], cartan), 1e-8,
                   routes={"terms": terms, "general_cartan": cartan}),
        ]
        mq = sc.motion_rule()
        worst, routes = 0.0, {}
        for t in (0.0, sc.h, -sc.h):
            a = transported_energy_oracle_p1(H, A, sc.region, sc.motion, t)
            b = energy_under_motion(sc.system, sc.region, sc.motion, t, mq)
            worst = max(worst, _rel(a, b))
            routes[f"t={t:.6g}"] = {"oracle": a, "pullback": b}
        out.append(_check(sc, "reduce.transported_p1", worst, 1e-8, routes=routes))
        params = uniform_field_parameters(sc)
        if params is not None:
            B, J, wv = params
            expected = -0.5 * float(np.dot(np.cross(J, B), wv)) * sc.region.volume
            out.append(_check(sc, "reduce.uniform_field_half_lorentz", abs(terms["grad_alpha"] - expected), 1e-10,
                              routes={"grad_alpha": terms["grad_alpha"], "expected": expected,
                                      "lorentz": terms["lorentz"]}))
        return out

    return guarded("reduce.magnetostatic_pointwise", 1e-9, run)


def run(command: str, sc: Scenario, seed: int) -> list[Check]:
    plan: dict[str, Callable[[], list[Check]]] = {
        "identities": lambda: identity_checks(sc, seed),
        "energy": lambda: energy_checks(sc),
        "force": lambda: force_checks(sc),
        "reduce-p0": lambda: reduce_p0_checks(sc),
        "reduce-p1": lambda: reduce_p1_checks(sc),
    }
    if command == "all":
        selected = ["identities", "energy", "force"]
        if sc.n == 3 and sc.p in (0, 1):
            selected.append(f"reduce-p{sc.p}")
    else:
        selected = [command]
    by_name: dict[str, Check] = {}
    for key in selected:
        for c in plan[key]():
            by_name[c.name] = c
    return [by_name[k] for k in sorted(by_name)]


# -- report ---------------------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    return x


def build_report(command: str, scenario_path: str, checks: Iterable[Check], seed: int,
                 settings: dict, warnings: list[str]) -> dict:
    checks = list(checks)
    failed = [c.name for c in checks if not c.passed]
    return _jsonable({
        "schema": SCHEMA,
        "command": command,
        "scenario": scenario_path,
        "seed": seed,
        "rng": "numpy PCG64",
        "settings": settings,
        "warnings": warnings,
        "checks": [c.as_dict() for c in checks],
        "summary": {"total": len(checks), "passed": len(checks) - len(failed), "failed": failed,
                    "all_passed": not failed},
    })


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pformed", description="Verify p-form electrodynamics routes on a scenario.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario", required=True, help="scenario JSON file")
    ap.add_argument("--seed", type=int, default=None, help="seed for the random property suites")
    ap.add_argument("--quad-order", type=int, default=None, help="Gauss points per axis (raised to exactness)")
    ap.add_argument("--h", type=float, default=None, help="finite-difference step")
    ap.add_argument("--json-out", default=None, help="write the report here instead of stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = parser().parse_args(argv)
    seed = args.seed
    warnings: list[str] = []
    try:
        sc = load_scenario(args.scenario)
        if args.quad_order is not None:
            if args.quad_order < 1:
                raise ScenarioError(f"quad_order must be an integer >= 1, got {args.quad_order}")
            sc.quad_order = args.quad_order
        if args.h is not None:
            if not args.h > 0:
                raise ScenarioError(f"fd step h must be positive, got {args.h}")
            sc.h = args.h
        if seed is None:
            seed = sc.seed if sc.seed is not None else DEFAULT_SEED
        checks = run(args.command, sc, seed)
        warnings = sc.warnings
        settings = {"n": sc.n, "p": sc.p, "h": sc.h, "quad_order": sc.quad_order}
    except ScenarioError as exc:
        seed = DEFAULT_SEED if seed is None else seed
        checks = [Check("scenario.load", math.inf, 0.0, error=str(exc))]
        settings = {}
    report = build_report(args.command, args.scenario, checks, seed, settings, warnings)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
        for c in checks:
            print(c.line())
    else:
        sys.stdout.write(text)
    return 0 if report["summary"]["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
