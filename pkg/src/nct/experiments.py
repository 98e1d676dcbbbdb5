"""Configuration parsing and the five experiment runners behind the ``nct`` command.

Every runner returns a :class:`Report`: JSON records (one per line on
stdout), an optional CSV table, and an ``ok`` flag that becomes the exit
status.  Runs are sequential and iterate in config order, so a fixed config
and seed give identical bytes.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calculus import cwikel_operator, partial_derivative
from .core import (AlgebraElement, LatticeTruncation, OperatorMatrix, ThetaMatrix, adjoint, clock_shift_element,
                   clock_shift_rep, element_from_dict, l2_norm, left_mult_matrix, max_coeff_diff, mul,
                   periodized_trace, random_element, trace_state)
from .dirac import (build_A, gamma_matrices, quantized_differential, smoothed_sign_defect,
                    weighted_A)
from .spectral import SingularSpectrum, decay_exponent, hilbert_schmidt_norm, singular_values
from .traceformula import (LHS_FRACTION, ball_volume, calibrate_cd, directional_integrand,
                           directional_integrand_expanded, laplacian_dixmier, lattice_point_count,
                           lhs_dixmier, rhs_closed_form_d2, rhs_integral, sphere_grid,
                           weyl_dixmier_constant)

COMMANDS = ("verify", "sv-decay", "trace-formula", "calibrate", "defect")
VERIFY_TOL = 1e-10


class ConfigError(ValueError):
    """Invalid experiment configuration (exit status 2)."""


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


# -- configuration ---------------------------------------------------------

@dataclass
class NamedElement:
    id: str
    spec: dict

    def build(self, theta: ThetaMatrix) -> AlgebraElement:
        return element_from_dict(self.spec, theta)


def _standard_specs(d: int) -> list[NamedElement]:
    # real-coefficient self-adjoint polynomials used when no elements are given
    def e(j, s=1):
        n = [0] * d
        n[j] = s
        return n
    def pair(n, c):
        return [{"n": list(n), "re": c.real, "im": c.imag},
                {"n": [-v for v in n], "re": c.real, "im": -c.imag}]
    diag = [1] * d
    anti = [1, -1] + [0] * (d - 2)
    x1 = sum((pair(e(j), 1.0) for j in range(d)), [])
    x2 = pair(e(0), 1.0) + pair(diag, 0.5)
    x3 = pair(e(1), 1.0) + pair(anti, 0.4) + pair(e(0), 0.3j)
    return [NamedElement(f"x{i + 1}", {"d": d, "coeffs": c}) for i, c in enumerate([x1, x2, x3])]


def _parse_theta(obj, d: int) -> tuple[str, ThetaMatrix]:
    if isinstance(obj, str):
        try:
            return obj, ThetaMatrix.preset(obj, d)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        th = ThetaMatrix(np.asarray(obj, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad theta {obj!r}: {exc}") from None
    if th.d != d:
        raise ConfigError(f"theta is {th.d}x{th.d}, config declares d={d}")
    return "custom", th


@dataclass
class ExperimentConfig:
    command: str = "verify"
    d: int = 2
    thetas: list = field(default_factory=lambda: [("zero", ThetaMatrix.zero(2))])
    elements: list = field(default_factory=list)
    radii: list = field(default_factory=lambda: [16])
    resolution: int = 64
    window: tuple | None = None
    lhs_fraction: float = LHS_FRACTION
    tolerance: float | None = None
    seed: int = 0
    n_random: int = 20
    output: str | None = None

    @classmethod
    def from_dict(cls, obj: dict, command: str | None = None) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {"command", "d", "theta", "elements", "radii", "quadrature_resolution",
                 "window", "lhs_fraction", "tolerance", "seed", "n_random", "output"}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cmd = command or obj.get("command", "verify")
        if obj.get("command") not in (None, cmd):
            raise ConfigError(f"config is for {obj['command']!r}, not {cmd!r}")
        if cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}")
        d = obj.get("d", 2)
        if not isinstance(d, int) or d < 2:
            raise ConfigError("d must be an integer >= 2")
        raw = obj.get("theta", "zero")
        # a list of presets / matrices is a sweep; a nested numeric list is one matrix
        if isinstance(raw, list) and raw and (isinstance(raw[0], str)
                                              or (isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list))):
            thetas = [_parse_theta(t, d) for t in raw]
        else:
            thetas = [_parse_theta(raw, d)]
        if len(thetas) > 1:
            thetas = [(tid if tid != "custom" else f"theta{i}", th) for i, (tid, th) in enumerate(thetas)]
        elements = []
        for i, spec in enumerate(obj.get("elements", [])):
            if not isinstance(spec, dict):
                raise ConfigError(f"element {i} is not a JSON object")
            spec = dict(spec)
            eid = str(spec.pop("id", f"x{i + 1}"))
            spec.setdefault("d", d)
            if spec["d"] != d:
                raise ConfigError(f"element {eid} has d={spec['d']}, config declares d={d}")
            try:
                element_from_dict(spec, thetas[0][1])
            except ValueError as exc:
                raise ConfigError(f"element {eid}: {exc}") from None
            elements.append(NamedElement(eid, spec))
        elements = elements or _standard_specs(d)
        radii = obj.get("radii", [16])
        if (not isinstance(radii, list) or not radii or not all(isinstance(r, int) and r >= 1 for r in radii)
                or any(b <= a for a, b in zip(radii, radii[1:]))):
            raise ConfigError("radii must be a strictly increasing list of positive integers")
        window = obj.get("window")
        if window is not None and (not isinstance(window, list) or len(window) != 2):
            raise ConfigError("window must be [k_min, k_max]")
        res = obj.get("quadrature_resolution", 64)
        if not isinstance(res, int) or res < 4:
            raise ConfigError("quadrature_resolution must be an integer >= 4")
        frac = float(obj.get("lhs_fraction", LHS_FRACTION))
        if not 0 < frac <= 1:
            raise ConfigError("lhs_fraction must lie in (0, 1]")
        return cls(cmd, d, thetas, elements, radii, res, tuple(window) if window else None, frac,
                   obj.get("tolerance"), int(obj.get("seed", 0)), int(obj.get("n_random", 20)),
                   obj.get("output"))

    @classmethod
    def load(cls, path, command: str | None = None) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(obj, command)

    def instances(self):
        """``(theta_id, theta, element_id, element)`` in config order."""
        for tid, th in self.thetas:
            for ne in self.elements:
                yield tid, th, ne.id, ne.build(th)


# -- reports ---------------------------------------------------------------

@dataclass
class Report:
    command: str
    records: list = field(default_factory=list)
    header: list | None = None
    rows: list = field(default_factory=list)
    ok: bool = True

    def jsonl(self) -> str:
        return "".join(json.dumps({k: _jsonable(v) for k, v in r.items()}) + "\n" for r in self.records)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def write_csv(self, path):
        Path(path).write_text(self.csv_text(), encoding="utf-8")


# -- verify ------------------------------------------------------------------

def _oracle_residuals(p: int, q: int, radius: int = 3) -> tuple[float, float]:
    th = ThetaMatrix.from_pair(2, p / q)
    monos = [AlgebraElement.monomial(th, n) for n in itertools.product(range(-radius, radius + 1), repeat=2)]
    reps = [clock_shift_rep(p, q, a.support[0]) for a in monos]
    prod_err = tr_err = 0.0
    for a, ra in zip(monos, reps):
        for b, rb in zip(monos, reps):
            ab = mul(a, b)
            prod_err = max(prod_err, np.abs(clock_shift_element(p, q, ab) - ra @ rb).max())
            tr_err = max(tr_err, abs(np.trace(ra @ rb) / q - periodized_trace(ab, q)))
    return float(prod_err), float(tr_err)


def _verify_checks(cfg: ExperimentConfig, tid: str, th: ThetaMatrix):
    rng = np.random.default_rng(cfg.seed)
    d = cfg.d
    rand = [random_element(th, 2, rng, n_terms=5) for _ in range(cfg.n_random)]

    yield "plancherel", max(abs(l2_norm(x) ** 2 - trace_state(mul(adjoint(x), x)).real) for x in rand)
    yield "associativity", max(max_coeff_diff(mul(mul(a, b), c), mul(a, mul(b, c)))
                               for a, b, c in zip(rand, rand[1:], rand[2:]))
    yield "traciality", max(abs(trace_state(mul(a, b)) - trace_state(mul(b, a))) for a, b in zip(rand, rand[1:]))
    yield "leibniz", max(max_coeff_diff(partial_derivative(mul(a, b), j),
                                        mul(partial_derivative(a, j), b) + mul(a, partial_derivative(b, j)))
                         for a, b in zip(rand, rand[1:]) for j in range(1, d + 1))
    # columns at distance >= 2 from the boundary see no truncation loss
    T = LatticeTruncation(d, 5 if d == 2 else 3)
    cols = _inner(T, T.radius - 2)
    yield "gns_homomorphism", max(
        np.abs(left_mult_matrix(mul(a, b), T).entries[:, cols]
               - (left_mult_matrix(a, T).entries @ left_mult_matrix(b, T).entries)[:, cols]).max()
        for a, b in zip(rand[:5], rand[1:6]))
    for dd in (2, 3, 4):
        G = gamma_matrices(dd)
        yield f"clifford_d{dd}", max(G.clifford_defect(), G.hermiticity_defect())
    s_rng = rng.standard_normal((8, d))
    dirs = s_rng / np.linalg.norm(s_rng, axis=1, keepdims=True)
    yield "symbol_expansion", max(max_coeff_diff(directional_integrand(x, s), directional_integrand_expanded(x, s))
                                  for x in rand[:5] for s in dirs)
    # HS identity: g supported in the radius-2 cube, x in radius 2, window radius 4 holds the product
    Tc = LatticeTruncation(d, 4)
    g_vals = {}
    for n in itertools.product(range(-2, 3), repeat=d):
        g_vals[n] = complex(rng.standard_normal(), rng.standard_normal())
    g = lambda n: g_vals.get(n, 0.0)
    g_l2 = math.sqrt(sum(abs(v) ** 2 for v in g_vals.values()))
    yield "hs_cwikel", max(abs(hilbert_schmidt_norm(cwikel_operator(x, g, Tc)) - l2_norm(x) * g_l2) for x in rand[:5])
    G = gamma_matrices(d)
    Td = LatticeTruncation(d, 5 if d == 2 else 3)
    sa = [0.5 * (x + adjoint(x)) for x in rand[:4]]
    yield "dx_adjoint", max(np.abs(quantized_differential(x, G, Td).entries.conj().T
                                   - quantized_differential(adjoint(x), G, Td).entries).max() for x in rand[:4])
    yield "A_hermitian", max(build_A(x, G, Td).hermiticity_defect() for x in sa)
    yield "A_two_paths", max(np.abs(build_A(x, G, Td).entries - build_A(x, G, Td, composed=True).entries).max()
                             for x in rand[:4])
    if d == 2:
        Q = sphere_grid(2, cfg.resolution)
        yield "rhs_closed_form", max(abs(rhs_integral(x, Q) - rhs_closed_form_d2(x)) / max(rhs_closed_form_d2(x), 1.0)
                                     for x in sa)


def _inner(T: LatticeTruncation, r: int) -> np.ndarray:
    return np.nonzero(np.abs(T.modes).max(axis=1) <= r)[0]


def run_verify(cfg: ExperimentConfig) -> Report:
    rep = Report("verify", header=["check", "theta_id", "max_residual", "tolerance", "passed"])
    tol = cfg.tolerance if cfg.tolerance is not None else VERIFY_TOL
    checks = []
    for p, q in ((1, 3), (2, 5)):
        prod_err, tr_err = _oracle_residuals(p, q)
        checks.append((f"clock_shift_product_{p}/{q}", f"{p}/{q}", prod_err))
        checks.append((f"clock_shift_trace_{p}/{q}", f"{p}/{q}", tr_err))
    for tid, th in cfg.thetas:
        checks.extend((name, tid, float(val)) for name, val in _verify_checks(cfg, tid, th))
    for name, tid, val in checks:
        passed = bool(val <= tol)
        rep.ok &= passed
        rep.rows.append([name, tid, val, tol, passed])
        rep.records.append({"check": name, "theta_id": tid, "max_residual": val, "tolerance": tol, "passed": passed})
    return rep


# -- spectra -----------------------------------------------------------------

def dx_spectrum(x: AlgebraElement, radius: int) -> SingularSpectrum:
    T = LatticeTruncation(x.d, radius)
    return singular_values(quantized_differential(x, gamma_matrices(x.d), T))


def run_sv_decay(cfg: ExperimentConfig) -> Report:
    rep = Report("sv-decay", header=["x_id", "theta_id", "radius", "k", "mu_k", "scaled_mu_k"])
    for tid, th, xid, x in cfg.instances():
        for R in cfg.radii:
            s = dx_spectrum(x, R)
            scaled = (np.arange(len(s)) + 1.0) ** (1.0 / cfg.d) * s.values
            for k, (mu, sc) in enumerate(zip(s.values, scaled)):
                rep.rows.append([xid, tid, R, k, float(mu), float(sc)])
            k_min, k_max = cfg.window if cfg.window else (50, int(len(s) * 0.9) - 1)
            k_max = min(k_max, len(s) - 1)
            window = s.values[k_min:k_max + 1]
            if np.all(window > 0):
                exponent = decay_exponent(s, k_min, k_max)
                weak = float(np.max((np.arange(k_min, k_max + 1) + 1.0) ** (1.0 / cfg.d) * window))
                status = "ok"
            else:
                exponent, weak, status = None, float(np.max(scaled, initial=0.0)), "not-applicable"
            rep.records.append({"x_id": xid, "d": cfg.d, "theta_id": tid, "radius": R, "k_min": k_min, "k_max": k_max,
                                "exponent": exponent, "weak_norm": weak, "fit": status})
    return rep


# -- trace formula -------------------------------------------------------------

def ratio_spread(ratios) -> float:
    """``(max - min) / mean`` of positive ratios."""
    r = np.asarray([v for v in ratios if v is not None], dtype=float)
    if r.size < 2:
        return 0.0
    return float((r.max() - r.min()) / r.mean())


def run_trace_formula(cfg: ExperimentConfig) -> Report:
    rep = Report("trace-formula", header=["x_id", "d", "theta_id", "radius", "resolution", "rhs",
                                          "lhs_extrapolated", "ratio"])
    Q = sphere_grid(cfg.d, cfg.resolution, seed=cfg.seed)
    tol = cfg.tolerance if cfg.tolerance is not None else 0.10
    ratios = []
    for tid, th, xid, x in cfg.instances():
        rhs = rhs_integral(x, Q)
        for R in cfg.radii:
            lhs = lhs_dixmier(x, LatticeTruncation(cfg.d, R), fraction=cfg.lhs_fraction)
            ratio = lhs / rhs if rhs > 0 else None
            if R == cfg.radii[-1]:
                ratios.append(ratio)
            rec = {"x_id": xid, "d": cfg.d, "theta_id": tid, "radius": R, "resolution": Q.resolution,
                   "rhs": rhs, "lhs_extrapolated": lhs, "ratio": ratio}
            rep.records.append(rec)
            rep.rows.append([rec[h] for h in rep.header])
    spread = ratio_spread(ratios)
    rep.ok = spread <= tol
    valid = [r for r in ratios if r is not None]
    rep.records.append({"summary": "ratio", "radius": cfg.radii[-1], "mean_ratio": float(np.mean(valid)) if valid else None,
                        "spread": spread, "tolerance": tol, "constant": rep.ok})
    return rep


# -- calibration ---------------------------------------------------------------

def run_calibrate(cfg: ExperimentConfig) -> Report:
    rep = Report("calibrate", header=["radius", "lattice_count", "weyl_count", "laplacian_dixmier",
                                      "weyl_target", "relative_error", "c_hat"])
    tol = cfg.tolerance if cfg.tolerance is not None else 0.03
    d = cfg.d
    G = gamma_matrices(d)
    target = weyl_dixmier_constant(d)
    for R in cfg.radii:
        T = LatticeTruncation(d, R)
        count = lattice_point_count(R, d)
        lam = laplacian_dixmier(T)
        rel = abs(lam - target) / target
        c_hat = calibrate_cd(d, G, T)
        rep.ok &= rel <= tol
        row = [R, count, ball_volume(d) * R ** d, lam, target, rel, c_hat]
        rep.rows.append(row)
        rep.records.append(dict(zip(rep.header, row)) | {"d": d, "N": G.N, "tolerance": tol})
    return rep


# -- defects -------------------------------------------------------------------

def run_defect(cfg: ExperimentConfig) -> Report:
    """Smoothed-sign defect (per radius) and ``dx - A (1+D^2)^(-1/2)`` (per element and radius)."""
    rep = Report("defect", header=["kind", "x_id", "theta_id", "radius", "k", "mu_k"])
    d = cfg.d
    G = gamma_matrices(d)
    tol = cfg.tolerance if cfg.tolerance is not None else 0.05
    for R in cfg.radii:
        T = LatticeTruncation(d, R)
        s = smoothed_sign_defect(G, T)
        k_min, k_max = cfg.window if cfg.window else (100, min(2000, int(len(s) * 0.9) - 1))
        exponent = decay_exponent(s, k_min, k_max)
        target = -2.0 / d
        rep.ok &= abs(exponent - target) <= tol
        rep.records.append({"kind": "smoothed_sign", "d": d, "radius": R, "k_min": k_min, "k_max": k_max,
                            "exponent": exponent, "target": target})
        rep.rows.extend(["smoothed_sign", "", "", R, k, float(mu)] for k, mu in enumerate(s.values))
    for tid, th, xid, x in cfg.instances():
        for R in cfg.radii:
            T = LatticeTruncation(d, R)
            diff = quantized_differential(x, G, T).entries - weighted_A(x, G, T).entries
            s = singular_values(OperatorMatrix(diff, T, G.N, "dx - A(1+D^2)^(-1/2)"))
            k_min, k_max = cfg.window if cfg.window else (50, min(1000, int(len(s) * 0.9) - 1))
            if np.all(s.values[k_min:k_max + 1] > 0):
                exponent = decay_exponent(s, k_min, k_max)
            else:
                exponent = None
            rep.records.append({"kind": "principal_comparison", "x_id": xid, "theta_id": tid, "d": d, "radius": R,
                                "k_min": k_min, "k_max": k_max, "exponent": exponent, "target": -2.0 / d})
            rep.rows.extend(["principal_comparison", xid, tid, R, k, float(mu)] for k, mu in enumerate(s.values))
    return rep


RUNNERS = {
    "verify": run_verify,
    "sv-decay": run_sv_decay,
    "trace-formula": run_trace_formula,
    "calibrate": run_calibrate,
    "defect": run_defect,
}


def run(cfg: ExperimentConfig) -> Report:
    return RUNNERS[cfg.command](cfg)
