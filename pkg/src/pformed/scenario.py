"""JSON scenarios: a system, a velocity field, a region and run settings.

Polynomials are lists of terms ``{"coeff": c, "exp": [e1, ..., en]}`` (a bare
number is a constant); forms are maps ``{"[i, j, ...]": polynomial}`` with
1-based axes, ``"[]"`` being the key of a 0-form.  In R^3 the Maxwell form may
be given by a vector proxy ``"D"`` (p = 0) or ``"H"`` (p = 1), and a 1-form
potential by ``"alpha_sharp"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import r3
from .ed import EDSystem, motion_quadrature
from .flows import Motion
from .force import force_quadrature
from .forms import DifferentialForm, VectorField, sort_sign
from .poly import PolynomialField
from .regions import DEFAULT_ORDER, Box, QuadratureRule, Region

DEGREE_WARNING = 24
DEFAULT_STEP = 1e-3


class ScenarioError(ValueError):
    pass


@dataclass
class Scenario:
    n: int
    p: int
    system: EDSystem
    w: VectorField
    region: Region
    u: VectorField | None = None
    quad_order: int | None = None
    h: float = DEFAULT_STEP
    tolerances: dict[str, float] = field(default_factory=dict)
    seed: int | None = None
    name: str = ""
    proxies: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def motion(self) -> Motion:
        return Motion(self.w, self.u)

    def quadrature(self, required: QuadratureRule) -> QuadratureRule:
        """The requested order, raised to ``required`` when it is too low."""
        if self.quad_order is None:
            return QuadratureRule(max(DEFAULT_ORDER, required.order))
        if self.quad_order < required.order:
            msg = f"quad_order {self.quad_order} raised to exactness bound {required.order}"
            if msg not in self.warnings:
                self.warnings.append(msg)
            return required
        return QuadratureRule(self.quad_order)

    def energy_rule(self) -> QuadratureRule:
        from .ed import energy_quadrature

        return self.quadrature(energy_quadrature(self.system))

    def force_rule(self) -> QuadratureRule:
        return self.quadrature(force_quadrature(self.system, self.w))

    def motion_rule(self) -> QuadratureRule:
        return self.quadrature(motion_quadrature(self.system, self.motion))

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))


def parse_poly(raw: Any, n: int, where: str = "polynomial") -> PolynomialField:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return PolynomialField.constant(n, float(raw))
    if not isinstance(raw, list):
        raise ScenarioError(f"{where}: expected a list of terms or a number")
    terms: dict[tuple[int, ...], float] = {}
    for term in raw:
        if not isinstance(term, dict) or "coeff" not in term or "exp" not in term:
            raise ScenarioError(f"{where}: each term needs 'coeff' and 'exp'")
        exp = term["exp"]
        if len(exp) != n or any(not isinstance(e, int) or e < 0 for e in exp):
            raise ScenarioError(f"{where}: exponent {exp} must be {n} nonnegative integers")
        key = tuple(exp)
        terms[key] = terms.get(key, 0.0) + float(term["coeff"])
    return PolynomialField(n, terms)


def parse_form(raw: Any, n: int, grade: int, where: str) -> DifferentialForm:
    if not isinstance(raw, dict):
        raise ScenarioError(f"{where}: a form is a map from index lists to polynomials")
    coeffs: dict[tuple[int, ...], PolynomialField] = {}
    for key, poly in raw.items():
        try:
            idx = tuple(json.loads(key))
        except (json.JSONDecodeError, TypeError) as exc:
            raise ScenarioError(f"{where}: bad index key {key!r}") from exc
        if len(idx) != grade:
            raise ScenarioError(f"{where}: grade must be {grade}, key {key} has grade {len(idx)}")
        if any(not isinstance(i, int) or not 1 <= i <= n for i in idx):
            raise ScenarioError(f"{where}: indices in {key} must lie in 1..{n}")
        sign, sorted_idx = sort_sign(idx)
        if sign == 0:
            raise ScenarioError(f"{where}: repeated index in {key}")
        value = parse_poly(poly, n, f"{where}{key}") * float(sign)
        coeffs[sorted_idx] = coeffs.get(sorted_idx, PolynomialField.zero(n)) + value
    return DifferentialForm(n, grade, coeffs)


def parse_vector(raw: Any, n: int, where: str) -> VectorField:
    if not isinstance(raw, list) or len(raw) != n:
        raise ScenarioError(f"{where}: expected {n} component polynomials")
    return VectorField([parse_poly(c, n, f"{where}[{i + 1}]") for i, c in enumerate(raw)])


def parse_region(raw: Any, n: int) -> Region:
    if not isinstance(raw, dict) or not isinstance(raw.get("boxes"), list) or not raw["boxes"]:
        raise ScenarioError("region: expected {\"boxes\": [{\"min\": [...], \"max\": [...]}, ...]}")
    boxes = []
    for i, b in enumerate(raw["boxes"]):
        lo, hi = b.get("min"), b.get("max")
        if not isinstance(lo, list) or not isinstance(hi, list):
            raise ScenarioError(f"region: box {i} needs 'min' and 'max' lists")
        if len(lo) != n or len(hi) != n:
            raise ScenarioError(f"region dimension must equal n = {n}: box {i} has {len(lo)}/{len(hi)} coordinates")
        try:
            boxes.append(Box(tuple(map(float, lo)), tuple(map(float, hi))))
        except ValueError as exc:
            raise ScenarioError(f"region: box {i}: {exc}") from exc
    try:
        return Region(tuple(boxes))
    except ValueError as exc:
        raise ScenarioError(f"region: {exc}") from exc


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise ScenarioError(f"missing required field '{key}'")
    return data[key]


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object")
    n, p = _require(data, "n"), _require(data, "p")
    if not isinstance(n, int) or n < 1:
        raise ScenarioError(f"n must be a positive integer, got {n!r}")
    if not isinstance(p, int) or not 0 <= p <= n - 1:
        raise ScenarioError(f"p must satisfy 0 <= p <= n-1 = {n - 1}, got {p!r}")

    proxies: dict[str, Any] = {}
    if "g" in data:
        grade = len(json.loads(next(iter(data["g"])))) if data["g"] else n - p - 1
        g = parse_form(data["g"], n, grade, "g")
    elif "D" in data or "H" in data:
        key = "D" if "D" in data else "H"
        want = 0 if key == "D" else 1
        if n != 3 or p != want:
            raise ScenarioError(f"proxy '{key}' requires n = 3 and p = {want}")
        proxies[key] = parse_vector(data[key], 3, key)
        g = r3.proxy_to_2form(proxies[key]) if key == "D" else r3.flat(proxies[key])
    else:
        raise ScenarioError("missing required field 'g' (or proxy 'D'/'H')")

    if "alpha" in data:
        raw = data["alpha"]
        if isinstance(raw, (list, int, float)):
            if p != 0:
                raise ScenarioError(f"grade(alpha) must be p = {p}: a bare polynomial is a 0-form")
            alpha = DifferentialForm.scalar(parse_poly(raw, n, "alpha"))
        else:
            grade = len(json.loads(next(iter(raw)))) if raw else p
            alpha = parse_form(raw, n, grade, "alpha")
    elif "alpha_sharp" in data:
        if n != 3 or p != 1:
            raise ScenarioError("proxy 'alpha_sharp' requires n = 3 and p = 1")
        proxies["alpha_sharp"] = parse_vector(data["alpha_sharp"], 3, "alpha_sharp")
        alpha = r3.flat(proxies["alpha_sharp"])
    else:
        raise ScenarioError("missing required field 'alpha' (or proxy 'alpha_sharp')")

    try:
        system = EDSystem(n, p, g, alpha)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    if n == 3 and p == 0:
        proxies.setdefault("D", r3.proxy_of_2form(g))
    if n == 3 and p == 1:
        proxies.setdefault("H", r3.sharp(g))
        proxies.setdefault("alpha_sharp", r3.sharp(alpha))

    w = parse_vector(_require(data, "w"), n, "w")
    u = parse_vector(data["u"], n, "u") if data.get("u") is not None else None
    region = parse_region(_require(data, "region"), n)

    quad = data.get("quad_order")
    if quad is not None and (not isinstance(quad, int) or quad < 1):
        raise ScenarioError(f"quad_order must be an integer >= 1, got {quad!r}")
    h = float(data.get("h", DEFAULT_STEP))
    if not h > 0:
        raise ScenarioError(f"fd step h must be positive, got {h}")
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict) or any(not isinstance(v, (int, float)) for v in tolerances.values()):
        raise ScenarioError("tolerances must map check names to numbers")
    seed = data.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise ScenarioError(f"seed must be an integer, got {seed!r}")

    sc = Scenario(n, p, system, w, region, u, quad, h, dict(tolerances), seed,
                  str(data.get("name", "")), proxies)
    _degree_warnings(sc)
    return sc


def _degree_warnings(sc: Scenario) -> None:
    m = sc.motion.degree()
    sys = sc.system
    worst = max(sys.g.degree(), 0) + max(sys.alpha.degree(), 0) * max(m, 1) + (sys.p + 1) * max(m - 1, 0)
    if worst > DEGREE_WARNING:
        sc.warnings.append(f"transported integrand degree {worst} exceeds {DEGREE_WARNING}")


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error in {path}: {exc}") from exc
    return scenario_from_dict(data)
