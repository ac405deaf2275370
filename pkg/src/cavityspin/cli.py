"""Command-line surface: flag/config ingestion, dispatch, CSV + sidecar output.

One command per process.  Parameters may be given at any one of three
levels (raw drive, effective JC, or spin couplings) where the command
supports it; grids are comma-separated lists.  A JSON config file supplies
defaults and explicit flags override it.  Energies are reported in units
of omega_at unless ``--units raw``.  Exit codes: 0 success, 1 compute
failure, 2 usage error; failures print a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import math
import sys
import time
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import io as tableio
from .frustration import QUALITY_MIN, region_scan
from .geometry import ArrayGeometry
from .jcmodel import (
    JCBasis,
    jc_correlation_ratio,
    jc_ground_state,
    jc_sector_ground,
    one_excitation_crossing_g,
    superradiant_critical_g,
)
from .meanfield import mf_critical_g
from .meanfield import solve as mf_solve
from .onedim import SIGN_TABLE_ROWS, classify_1d, ground_state_1d
from .params import (
    EffectiveJCParams,
    PhysicalDriveParams,
    RegimeError,
    ResonanceError,
    SpinCouplings,
    analyze,
    delta_b_from_eta,
    derive_effective_params,
    derive_spin_couplings,
)
from .spinmodel import (
    correlation_ratio,
    excitation_curve,
    sector_ground,
    transition_couplings,
)
from .symmetry import build_group, orbits, polya_count

WORKERS_ENV = "CAVITYSPIN_WORKERS"


class UsageError(Exception):
    """Unusable flags or config file; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


@dataclasses.dataclass
class CommandResult:
    """Raw (unscaled) table plus which columns carry energies."""

    semantic: dict
    columns: tuple[str, ...]
    rows: list[tuple]
    energy_columns: tuple[str, ...] = ()
    omega_unit: Optional[float] = None


_MISSING = object()


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _opt(
    args: argparse.Namespace,
    cfg: dict,
    name: str,
    cast: Optional[Callable[[Any], Any]] = None,
    default: Any = None,
):
    value = getattr(args, name, None)
    if value is None:
        value = cfg.get(name)
    if value is None:
        return default
    if cast is None:
        return value
    try:
        return cast(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {_flag(name)}: {exc}") from exc


def _req(args, cfg, name, cast=None):
    value = _opt(args, cfg, name, cast, default=_MISSING)
    if value is _MISSING:
        raise UsageError(f"missing required option {_flag(name)}")
    return value


def _floats(value) -> list[float]:
    if isinstance(value, str):
        return [float(p) for p in value.split(",") if p.strip() != ""]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(value)]


def _ints(value) -> list[int]:
    out = []
    for v in _floats(value):
        if v != int(v):
            raise ValueError(f"{v} is not an integer")
        out.append(int(v))
    return out


def _bool(args, cfg, name, default: Optional[bool]) -> Optional[bool]:
    value = getattr(args, name, None)
    if value is None:
        value = cfg.get(name)
    if value is None:
        return default
    if not isinstance(value, bool):
        raise UsageError(f"{_flag(name)} must be a boolean")
    return value


def _nonempty(grid: list, name: str) -> list:
    if not grid:
        raise UsageError(f"empty sweep grid for {_flag(name)}")
    return grid


def _geometry(args, cfg) -> ArrayGeometry:
    lx = _req(args, cfg, "lx", int)
    ly = _req(args, cfg, "ly", int)
    return ArrayGeometry(lx, ly)


def _resolve_level(args, cfg, *, need_modes: bool):
    """Build couplings from exactly one parameter level.

    Markers: --g0 selects the drive level, --g the JC level, --lambda-a the
    spin level.  Returns (SpinCouplings, EffectiveJCParams or None, semantic
    dict); commands that need mode detunings reject the spin level.
    """
    markers = [
        name
        for name, given in (
            ("drive", _opt(args, cfg, "g0") is not None),
            ("jc", _opt(args, cfg, "g") is not None),
            ("spin", _opt(args, cfg, "lambda_a") is not None),
        )
        if given
    ]
    if len(markers) != 1:
        raise UsageError(
            "exactly one parameter level required: --g0 ... (drive), "
            "--g ... (JC), or --lambda-a ... (spin)"
        )
    level = markers[0]
    if level == "spin":
        if need_modes:
            raise UsageError("this command needs mode detunings: use the JC or drive level")
        omega = _req(args, cfg, "omega", float)
        lam_a = _req(args, cfg, "lambda_a", float)
        lam_b = _opt(args, cfg, "lambda_b", float, default=lam_a)
        couplings = SpinCouplings(lambda_a=lam_a, lambda_b=lam_b, omega_at=omega)
        semantic = {
            "level": "spin",
            "omega_at": omega,
            "lambda_a": lam_a,
            "lambda_b": lam_b,
        }
        return couplings, None, semantic

    delta_a = _req(args, cfg, "delta_a", float)
    delta_b = _opt(args, cfg, "delta_b", float)
    eta = _opt(args, cfg, "eta", float)
    if delta_b is not None and eta is not None:
        raise UsageError("give --delta-b or --eta, not both")
    if level == "jc":
        omega = _req(args, cfg, "omega", float)
        g = _req(args, cfg, "g", float)
        if delta_b is None:
            delta_b = delta_b_from_eta(delta_a, omega, eta) if eta is not None else delta_a
        jc = EffectiveJCParams(omega_at=omega, g=g, delta_a=delta_a, delta_b=delta_b)
    else:
        drive = PhysicalDriveParams(
            omega_rabi=_req(args, cfg, "rabi", float),
            g0=_req(args, cfg, "g0", float),
            delta_e=_req(args, cfg, "delta_e", float),
        )
        jc = derive_effective_params(drive, delta_a, delta_a)
        if delta_b is None:
            delta_b = (
                delta_b_from_eta(delta_a, jc.omega_at, eta)
                if eta is not None
                else delta_a
            )
        jc = dataclasses.replace(jc, delta_b=delta_b)
    couplings = derive_spin_couplings(jc)
    semantic = {
        "level": level,
        "omega_at": jc.omega_at,
        "g": jc.g,
        "delta_a": delta_a,
        "delta_b": delta_b,
    }
    return couplings, jc, semantic


# ---------------------------------------------------------------------------
# command handlers


def _cmd_derive_params(args, cfg, seed: int) -> CommandResult:
    drive = PhysicalDriveParams(
        omega_rabi=_req(args, cfg, "rabi", float),
        g0=_req(args, cfg, "g0", float),
        delta_e=_req(args, cfg, "delta_e", float),
    )
    delta_a = _req(args, cfg, "delta_a", float)
    delta_b = _opt(args, cfg, "delta_b", float)
    eta = _opt(args, cfg, "eta", float)
    if delta_b is not None and eta is not None:
        raise UsageError("give --delta-b or --eta, not both")
    jc = derive_effective_params(drive, delta_a, delta_a)
    if delta_b is None:
        delta_b = (
            delta_b_from_eta(delta_a, jc.omega_at, eta) if eta is not None else delta_a
        )
    jc = dataclasses.replace(jc, delta_b=delta_b)
    couplings, tag = analyze(jc)
    row = (
        jc.omega_at,
        jc.g,
        jc.g_sign,
        delta_a,
        delta_b,
        couplings.lambda_a,
        couplings.lambda_b,
        couplings.eta,
        couplings.omega_at_prime,
        tag.frustration,
        tag.interaction_strength,
        tag.eps_a,
        tag.eps_b,
        "true" if tag.reduction_valid else "false",
        ";".join(jc.warnings) if jc.warnings else None,
    )
    return CommandResult(
        semantic={
            "rabi": drive.omega_rabi,
            "g0": drive.g0,
            "delta_e": drive.delta_e,
            "delta_a": delta_a,
            "delta_b": delta_b,
        },
        columns=(
            "omega_at",
            "g",
            "g_sign",
            "delta_a",
            "delta_b",
            "lambda_a",
            "lambda_b",
            "eta",
            "omega_at_prime",
            "frustration",
            "interaction_strength",
            "eps_a",
            "eps_b",
            "reduction_valid",
            "warnings",
        ),
        rows=[row],
        energy_columns=(
            "omega_at",
            "g",
            "delta_a",
            "delta_b",
            "lambda_a",
            "lambda_b",
            "omega_at_prime",
        ),
        omega_unit=jc.omega_at,
    )


def _cmd_spin_ed(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    couplings, _, level = _resolve_level(args, cfg, need_modes=False)
    nexc = _nonempty(_req(args, cfg, "nexc", _ints), "nexc")
    shift = _bool(args, cfg, "shift", True)
    k = _opt(args, cfg, "k", int, default=1)
    for n in nexc:
        if not 0 <= n <= geom.n_sites:
            raise UsageError(f"n_exc={n} outside [0, {geom.n_sites}]")
    rows = []
    for n in nexc:
        spec, basis = sector_ground(
            geom, couplings, n, include_lambda_shift=shift, k=k, seed=seed
        )
        rows.append(
            (n, basis.dim, spec.ground_energy, spec.ground_multiplet().shape[1])
        )
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "params": level,
            "nexc": nexc,
            "shift": shift,
            "k": k,
        },
        columns=("n_exc", "dim", "energy", "multiplet_size"),
        rows=rows,
        energy_columns=("energy",),
        omega_unit=couplings.omega_at,
    )


def _cmd_jc_ed(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    _, jc, level = _resolve_level(args, cfg, need_modes=True)
    n_max = _opt(args, cfg, "nmax", int)
    ntotal = _opt(args, cfg, "ntotal", _ints)
    rows = []
    if ntotal is not None:
        _nonempty(ntotal, "ntotal")
        for n in ntotal:
            spec, basis = jc_sector_ground(geom, jc, n, n_max=n_max, seed=seed)
            rows.append((n, basis.dim, spec.ground_energy, None))
    else:
        result = jc_ground_state(geom, jc, n_max=n_max, seed=seed)
        for n, energy in result.scan:
            dim = JCBasis(geom, n, n_max).dim
            rows.append(
                (n, dim, energy, "true" if n == result.n_total else "false")
            )
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "params": level,
            "ntotal": ntotal,
            "nmax": n_max,
        },
        columns=("n_total", "dim", "energy", "is_ground"),
        rows=rows,
        energy_columns=("energy",),
        omega_unit=jc.omega_at,
    )


def _cmd_crossover(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    omega = _req(args, cfg, "omega", float)
    if omega <= 0.0:
        raise UsageError("crossover sweep requires omega > 0")
    ratios = _nonempty(_req(args, cfg, "delta_ratios", _floats), "delta_ratios")
    sectors = _opt(args, cfg, "sectors", int, default=3)
    tol = _opt(args, cfg, "tol", float, default=1e-10)
    n_max = _opt(args, cfg, "nmax", int)
    tps = transition_couplings(
        geom,
        omega,
        lambda_min=-0.6 * omega,
        lambda_max=-1e-9 * omega,
        max_transitions=1,
    )
    if not tps:
        raise RegimeError("no 0 -> 1 spin crossing inside the search bracket")
    lam_c = tps[0].lambda_c
    rows = []
    for ratio in ratios:
        delta = ratio * omega
        rad = -2.0 * lam_c * (delta - omega)
        if rad <= 0.0:
            raise RegimeError(
                f"delta/omega = {ratio:g} gives no real spin-model coupling"
            )
        g_spin = math.sqrt(rad)
        try:
            g_jc = superradiant_critical_g(
                geom,
                omega,
                delta,
                delta,
                g_lo=0.5 * g_spin,
                g_hi=1.5 * g_spin,
                sectors=sectors,
                tol=tol,
                n_max=n_max,
                seed=seed,
            )
        except ValueError:
            g_jc = superradiant_critical_g(
                geom,
                omega,
                delta,
                delta,
                g_lo=0.2 * g_spin,
                g_hi=3.0 * g_spin,
                sectors=sectors,
                tol=tol,
                n_max=n_max,
                seed=seed,
            )
        g_closed = one_excitation_crossing_g(geom, omega, delta)
        rows.append(
            (ratio, lam_c, g_spin, g_jc, g_closed, abs(g_jc - g_spin) / g_spin)
        )
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "omega_at": omega,
            "delta_ratios": ratios,
            "sectors": sectors,
            "tol": tol,
            "nmax": n_max,
        },
        columns=(
            "delta_over_omega",
            "lambda_c_spin",
            "g_c_spin",
            "g_c_jc",
            "g_c_one_exc",
            "rel_diff",
        ),
        rows=rows,
        energy_columns=("lambda_c_spin", "g_c_spin", "g_c_jc", "g_c_one_exc"),
        omega_unit=omega,
    )


def _cmd_excitation_curve(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    omega = _req(args, cfg, "omega", float)
    lambdas = _nonempty(_req(args, cfg, "lambdas", _floats), "lambdas")
    shift = _bool(args, cfg, "shift", True)
    rows = excitation_curve(geom, omega, lambdas, include_lambda_shift=shift)
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "omega_at": omega,
            "lambdas": lambdas,
            "shift": shift,
        },
        columns=("lambda", "n_exc", "energy"),
        rows=[tuple(r) for r in rows],
        energy_columns=("lambda", "energy"),
        omega_unit=omega,
    )


def _cmd_correlations(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    couplings, _, level = _resolve_level(args, cfg, need_modes=False)
    nexc = _nonempty(_req(args, cfg, "nexc", _ints), "nexc")
    jc_ratio = _opt(args, cfg, "jc_delta_ratio", float)
    k = _opt(args, cfg, "k", int, default=8)
    rows = []
    for n in nexc:
        spec, basis = sector_ground(geom, couplings, n, k=k, seed=seed)
        r = correlation_ratio(spec, basis)
        rows.append(("spin", n, r.sigma_nn, r.sigma_nnn, r.ratio))
    if jc_ratio is not None:
        omega = couplings.omega_at
        delta_a = jc_ratio * omega
        rad = -2.0 * couplings.lambda_a * (delta_a - omega)
        if rad <= 0.0 or couplings.lambda_b == 0.0:
            raise RegimeError(
                "cannot realize these couplings at the requested detuning ratio"
            )
        g = math.sqrt(rad)
        delta_b = omega - g * g / (2.0 * couplings.lambda_b)
        jc = EffectiveJCParams(omega_at=omega, g=g, delta_a=delta_a, delta_b=delta_b)
        for n in nexc:
            spec, basis = jc_sector_ground(geom, jc, n, k=k, seed=seed)
            r = jc_correlation_ratio(spec, basis)
            rows.append(("jc", n, r.sigma_nn, r.sigma_nnn, r.ratio))
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "params": level,
            "nexc": nexc,
            "jc_delta_ratio": jc_ratio,
            "k": k,
        },
        columns=("model", "n_exc", "sigma_nn", "sigma_nnn", "ratio"),
        rows=rows,
    )


def _cmd_analytic_1d(args, cfg, seed: int) -> CommandResult:
    omega = _opt(args, cfg, "omega", float)
    lam = _opt(args, cfg, "lam", float)
    delta = _opt(args, cfg, "delta", float)
    n_spins = _opt(args, cfg, "n", int)
    given = [v is not None for v in (omega, lam, delta)]
    if any(given) and not all(given):
        raise UsageError("give all of --omega, --lam, --delta or none (sign table)")
    columns = (
        "omega_at",
        "lambda",
        "delta",
        "outcome",
        "m_ground",
        "n_exc",
        "photon_branch",
        "energy",
    )
    rows: list[tuple] = []
    if not any(given):
        for s_o, s_l, s_d, outcome in SIGN_TABLE_ROWS:
            rows.append(
                (float(s_o), float(s_l), float(s_d), outcome, None, None, None, None)
            )
    else:
        phase = classify_1d(omega, lam, delta)
        extra: tuple = (None, None, None, None)
        if n_spins is not None:
            g1 = ground_state_1d(n_spins, delta, omega, lam)
            extra = (g1.m_star, g1.n_exc, g1.photon_behavior, g1.energy)
        rows.append((omega, lam, delta, phase.outcome) + extra)
    return CommandResult(
        semantic={
            "omega_at": omega,
            "lam": lam,
            "delta": delta,
            "n": n_spins,
        },
        columns=columns,
        rows=rows,
    )


def _cmd_meanfield(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    delta = _req(args, cfg, "delta", float)
    omega = _req(args, cfg, "omega", float)
    gs = _opt(args, cfg, "g", _floats)
    g_c = mf_critical_g(geom, delta, omega)
    rows: list[tuple] = []
    if gs is None:
        rows.append((None, g_c, None, None, None, None))
    else:
        _nonempty(gs, "g")
        for g in gs:
            sol = mf_solve(geom, g, delta, omega)
            rows.append(
                (
                    g,
                    g_c,
                    sol.alpha_sq,
                    sol.n_exc,
                    sol.sigma_z,
                    "true" if sol.superradiant else "false",
                )
            )
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "delta": delta,
            "omega_at": omega,
            "g": gs,
        },
        columns=("g", "g_c", "alpha_sq", "n_exc", "sigma_z", "superradiant"),
        rows=rows,
        energy_columns=("g", "g_c"),
        omega_unit=omega,
    )


def _cmd_polya(args, cfg, seed: int) -> CommandResult:
    geom = _geometry(args, cfg)
    nexc = _opt(args, cfg, "nexc", _ints)
    if nexc is None:
        nexc = list(range(geom.n_sites + 1))
    _nonempty(nexc, "nexc")
    transpose = _bool(args, cfg, "transpose", None)
    group = build_group(geom, transpose)
    rows = []
    for n in nexc:
        if not 0 <= n <= geom.n_sites:
            raise UsageError(f"n_exc={n} outside [0, {geom.n_sites}]")
        classes = orbits(group, n)
        count = polya_count(group, n)
        if count != len(classes):
            raise ArithmeticError(
                f"pattern inventory {count} disagrees with orbit partition "
                f"{len(classes)} at n_exc={n}"
            )
        rows.append(
            (
                n,
                len(classes),
                ";".join(str(c.size) for c in classes),
                ";".join(str(c.stabilizer_order) for c in classes),
            )
        )
    return CommandResult(
        semantic={
            "lx": geom.lx,
            "ly": geom.ly,
            "nexc": nexc,
            "transpose": transpose,
        },
        columns=("n_exc", "n_classes", "class_sizes", "stabilizer_orders"),
        rows=rows,
    )


def _cmd_frustration_scan(args, cfg, seed: int) -> CommandResult:
    lx = _req(args, cfg, "lx", int)
    das = _nonempty(_req(args, cfg, "delta_a_ratios", _floats), "delta_a_ratios")
    etas = _nonempty(_req(args, cfg, "etas", _floats), "etas")
    ly_ratios = _nonempty(_req(args, cfg, "ly_ratios", _floats), "ly_ratios")
    omega = _opt(args, cfg, "omega", float, default=1.0)
    q_min = _opt(args, cfg, "qmin", float, default=QUALITY_MIN)
    workers = _opt(
        args, cfg, "workers", int, default=int(os.environ.get(WORKERS_ENV, "1"))
    )
    scan = region_scan(
        lx, das, etas, ly_ratios, omega_at=omega, q_min=q_min, workers=workers
    )
    rows = [
        (r.eta, r.ly_over_lx, r.delta_a_over_omega, r.r, r.q, r.valid) for r in scan
    ]
    return CommandResult(
        semantic={
            "lx": lx,
            "delta_a_ratios": das,
            "etas": etas,
            "ly_ratios": ly_ratios,
            "omega_at": omega,
            "qmin": q_min,
        },
        columns=("eta", "ly_over_lx", "delta_a_over_omega", "R", "Q", "valid"),
        rows=rows,
    )


_HANDLERS = {
    "derive-params": _cmd_derive_params,
    "spin-ed": _cmd_spin_ed,
    "jc-ed": _cmd_jc_ed,
    "crossover": _cmd_crossover,
    "excitation-curve": _cmd_excitation_curve,
    "correlations": _cmd_correlations,
    "analytic-1d": _cmd_analytic_1d,
    "meanfield": _cmd_meanfield,
    "polya": _cmd_polya,
    "frustration-scan": _cmd_frustration_scan,
}


# ---------------------------------------------------------------------------
# argument registration


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("--out", help="CSV output path (stdout when omitted)")
    p.add_argument("--sidecar", help="metadata JSON path (default: OUT.json)")
    p.add_argument("--units", choices=("omega", "raw"))
    p.add_argument("--seed", help="eigensolver start-vector seed")


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lx")
    p.add_argument("--ly")


def _add_level(p: argparse.ArgumentParser, include_spin: bool = True) -> None:
    p.add_argument("--omega", help="two-level splitting omega_at")
    p.add_argument("--g", help="JC coupling magnitude (JC level)")
    p.add_argument("--delta-a")
    p.add_argument("--delta-b")
    p.add_argument("--eta", help="lambda_b / lambda_a (alternative to --delta-b)")
    p.add_argument("--g0", help="bare photon coupling (drive level)")
    p.add_argument("--rabi", help="drive Rabi frequency (drive level)")
    p.add_argument("--delta-e")
    if include_spin:
        p.add_argument("--lambda-a", help="row coupling (spin level)")
        p.add_argument("--lambda-b")


def _build_parser() -> _Parser:
    parser = _Parser(prog="cavityspin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("derive-params", help="drive -> JC -> spin parameter chain")
    _add_common(p)
    _add_level(p, include_spin=False)

    p = sub.add_parser("spin-ed", help="fixed-sector spin-model ground states")
    _add_common(p)
    _add_geometry(p)
    _add_level(p)
    p.add_argument("--nexc", help="comma-separated excitation sectors")
    p.add_argument("--shift", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--k", help="eigenpairs per sector")

    p = sub.add_parser("jc-ed", help="JC lattice ground states per total-excitation sector")
    _add_common(p)
    _add_geometry(p)
    _add_level(p, include_spin=False)
    p.add_argument("--ntotal", help="comma-separated sectors (omit to scan)")
    p.add_argument("--nmax", help="per-mode photon cutoff")

    p = sub.add_parser("crossover", help="JC vs spin-model critical coupling")
    _add_common(p)
    _add_geometry(p)
    p.add_argument("--omega")
    p.add_argument("--delta-ratios", help="comma-separated delta/omega values")
    p.add_argument("--sectors")
    p.add_argument("--tol")
    p.add_argument("--nmax")

    p = sub.add_parser("excitation-curve", help="ground-sector staircase vs coupling")
    _add_common(p)
    _add_geometry(p)
    p.add_argument("--omega")
    p.add_argument("--lambdas", help="comma-separated coupling grid")
    p.add_argument("--shift", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("correlations", help="shared-line vs unshared pair correlations")
    _add_common(p)
    _add_geometry(p)
    _add_level(p)
    p.add_argument("--nexc")
    p.add_argument("--jc-delta-ratio", help="also run the JC model at this delta/omega")
    p.add_argument("--k")

    p = sub.add_parser("analytic-1d", help="single-mode closed-form phase classification")
    _add_common(p)
    p.add_argument("--omega")
    p.add_argument("--lam")
    p.add_argument("--delta")
    p.add_argument("--n", help="spin count (adds closed-form ground-state columns)")

    p = sub.add_parser("meanfield", help="coherent-state mean-field observables")
    _add_common(p)
    _add_geometry(p)
    p.add_argument("--delta")
    p.add_argument("--omega")
    p.add_argument("--g", help="comma-separated coupling grid (omit for g_c only)")

    p = sub.add_parser("polya", help="orbit counts and class tables")
    _add_common(p)
    _add_geometry(p)
    p.add_argument("--nexc")
    p.add_argument("--transpose", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("frustration-scan", help="validity map of the mixed regime")
    _add_common(p)
    p.add_argument("--lx")
    p.add_argument("--delta-a-ratios")
    p.add_argument("--etas")
    p.add_argument("--ly-ratios")
    p.add_argument("--omega")
    p.add_argument("--qmin")
    p.add_argument("--workers")

    return parser


def _load_config(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None)
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    cfg = {str(k).replace("-", "_"): v for k, v in raw.items()}
    declared = cfg.pop("command", None)
    if declared is not None and declared != args.command:
        raise UsageError(
            f"config file is for {declared!r}, but {args.command!r} was invoked"
        )
    return cfg


def _scale_rows(result: CommandResult, units: str) -> list[tuple]:
    if units == "raw" or result.omega_unit is None or not result.energy_columns:
        return result.rows
    w = result.omega_unit
    if w == 0.0:
        raise UsageError("omega_at = 0: energies have no omega units; use --units raw")
    idx = {result.columns.index(c) for c in result.energy_columns}
    scaled = []
    for row in result.rows:
        scaled.append(
            tuple(
                float(v) / w if i in idx and isinstance(v, (int, float)) else v
                for i, v in enumerate(row)
            )
        )
    return scaled


def _emit_error(kind: str, exc: BaseException) -> None:
    payload = {"error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        cfg = _load_config(args)
        units = _opt(args, cfg, "units", str, default="omega")
        if units not in ("omega", "raw"):
            raise UsageError("--units must be 'omega' or 'raw'")
        seed = _opt(args, cfg, "seed", int, default=0)
        handler = _HANDLERS[args.command]
        start = time.monotonic()
        result = handler(args, cfg, seed)
        wall = time.monotonic() - start
        semantic = dict(result.semantic)
        semantic["command"] = args.command
        semantic["units"] = units
        semantic["seed"] = seed
        table = tableio.ResultTable(
            columns=result.columns,
            rows=_scale_rows(result, units),
            metadata=tableio.make_metadata(args.command, semantic, wall),
        )
        out = _opt(args, cfg, "out", str)
        if out is None:
            sys.stdout.write(tableio.to_csv(table))
        else:
            tableio.write_outputs(table, out, _opt(args, cfg, "sidecar", str))
        return 0
    except UsageError as exc:
        _emit_error("usage", exc)
        return 2
    except OSError as exc:
        _emit_error("io", exc)
        return 2
    except (
        RegimeError,
        ResonanceError,
        ValueError,
        ArithmeticError,
        np.linalg.LinAlgError,
    ) as exc:
        _emit_error("compute", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
