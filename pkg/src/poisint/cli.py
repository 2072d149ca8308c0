"""Command-line front end: trajectory runs, structure checks, order studies, propagator spectra.

Subcommands
    integrate   run a configured method and emit a CSV trajectory
    verify      run a structure check (poisson | symplectic2d | drift:H | drift:C | tableau)
    order       measure global-error slopes against the closed-form oracle
    eig         report the spectrum of the one-step propagator R = M N P

Exit codes: 0 success / check passed, 1 check failed, 2 configuration
error, 3 numerical blow-up.  Options may come from ``--config FILE``
(flat ``key = value`` lines, ``#`` comments); command-line flags override
file values.  All floating-point output uses 17 significant digits, which
round-trips binary64 exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import integrators, rigidbody, verify
from .integrators import ButcherTableau, ImplicitSolverConfig, TABLEAUX, VectorField
from .poisson import PoissonSystem, canonical_structure
from .rigidbody import RigidBodyParams
from .verify import BlowUpError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3

POISSON_CHECK_TOL = 1e-6
SYMPLECTIC_CHECK_TOL = 1e-9
TABLEAU_CHECK_TOL = 1e-14
DRIFT_CHECK_TOL = 1e-10
EIG_CHECK_TOL = 1e-10

POISSON_CHECK_SAMPLES = 20
SYMPLECTIC_CHECK_SAMPLES = 20

_SPLIT_METHODS_RE = re.compile(r"^(lie_trotter|lie_trotter_frozen|strang|yoshida\d*)$")


class ConfigError(Exception):
    pass


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass
class SystemSpec:
    name: str
    dimension: int
    columns: tuple
    field: VectorField
    hamiltonian: Callable
    casimir: Optional[Callable]
    poisson: Optional[PoissonSystem]
    oracle: Optional[Callable]
    rigid_params: Optional[RigidBodyParams]


def _build_system(opts) -> SystemSpec:
    name = opts["system"]
    if name == "rigid_body":
        try:
            params = RigidBodyParams(opts["I1"], opts["I3"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return SystemSpec(
            name=name,
            dimension=3,
            columns=("m1", "m2", "m3"),
            field=VectorField(3, lambda m: rigidbody.euler_rhs(params, m)),
            hamiltonian=lambda m: rigidbody.hamiltonian(params, m),
            casimir=rigidbody.casimir,
            poisson=rigidbody.poisson_system(params),
            oracle=lambda m0, t: rigidbody.exact_solution(params, m0, t),
            rigid_params=params,
        )
    if name == "harmonic_oscillator":
        jmat = canonical_structure(1)
        energy = lambda x: 0.5 * float(x @ x)
        return SystemSpec(
            name=name,
            dimension=2,
            columns=("q", "p"),
            field=VectorField(2, lambda x: np.array([x[1], -x[0]])),
            hamiltonian=energy,
            casimir=None,
            poisson=PoissonSystem(2, lambda x: jmat, energy, lambda x: x.copy()),
            oracle=None,
            rigid_params=None,
        )
    if name == "affine":
        A, B = opts["A"], opts["B"]
        return SystemSpec(
            name=name,
            dimension=2,
            columns=("x1", "x2"),
            field=VectorField(2, lambda x: np.array([B * x[1], -A * x[1]])),
            hamiltonian=lambda x: A * x[0] + B * x[1],
            casimir=None,
            poisson=verify.affine_plane_system(A, B),
            oracle=None,
            rigid_params=None,
        )
    raise ConfigError(f"unknown system {name!r} (choose rigid_body, harmonic_oscillator or affine)")


def _resolve_tableau(opts, system: SystemSpec) -> ButcherTableau:
    spec = opts.get("tableau")
    if spec is None:
        if system.name == "affine":
            return ButcherTableau(a=[[opts["a_coef"]]], b=[opts["b_coef"]])
        return TABLEAUX["rk4"]
    if spec in TABLEAUX:
        return TABLEAUX[spec]
    try:
        raw = json.loads(spec)
        return ButcherTableau(a=raw["a"], b=raw["b"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(
            f"tableau must be one of {sorted(TABLEAUX)} or inline JSON with keys 'a' and 'b': {exc}"
        ) from exc


def _effective_method(opts) -> str:
    method = opts["method"]
    if opts.get("frozen") and method == "lie_trotter":
        return "lie_trotter_frozen"
    return method


def _build_step(opts, system: SystemSpec):
    """Return (step callable, is_split_method flag)."""
    method = _effective_method(opts)
    cfg = ImplicitSolverConfig()
    f = system.field
    if method == "euler":
        return (lambda x, h: integrators.explicit_euler_step(f, x, h)), False
    if method == "modified_euler":
        return (lambda x, h: integrators.modified_euler_step(f, x, h, cfg)), False
    if method == "trapezoid":
        return (lambda x, h: integrators.trapezoid_step(f, x, h, cfg)), False
    if method == "midpoint":
        return (lambda x, h: integrators.gauss_legendre_step(f, x, h, cfg)), False
    if method == "rk":
        tab = _resolve_tableau(opts, system)
        return (lambda x, h: integrators.rk_step(f, tab, x, h, cfg)), False
    if method == "ruth":
        if system.name != "harmonic_oscillator":
            raise ConfigError("method 'ruth' is defined for the harmonic_oscillator system only")
        return (lambda x, h: integrators.ruth_step(x, h)), False
    if _SPLIT_METHODS_RE.match(method):
        if system.name != "rigid_body":
            raise ConfigError(f"splitting method {method!r} needs the rigid_body system")
        return rigidbody.one_step_map(system.rigid_params, method).apply, True
    raise ConfigError(f"unknown method {opts['method']!r}")


def _initial_state(opts, system: SystemSpec) -> np.ndarray:
    m0 = opts.get("m0")
    if m0 is None:
        raise ConfigError("an initial state is required (--m0 a,b,...)")
    state = np.asarray(m0, dtype=float)
    if state.size != system.dimension:
        raise ConfigError(
            f"initial state has length {state.size}, system {system.name} needs {system.dimension}"
        )
    if not np.isfinite(state).all():
        raise ConfigError("initial state has non-finite entries")
    return state


def _check_run_params(opts):
    if not (opts["h"] > 0.0 and math.isfinite(opts["h"])):
        raise ConfigError("step size h must be finite and positive")
    if opts["steps"] < 1:
        raise ConfigError("steps must be >= 1")
    if opts["sample_every"] < 1:
        raise ConfigError("sample_every must be >= 1")


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="ascii", newline="\n"), True


def cmd_integrate(opts) -> int:
    system = _build_system(opts)
    step, is_split = _build_step(opts, system)
    state0 = _initial_state(opts, system)
    _check_run_params(opts)
    h = opts["h"]
    steps = opts["steps"]
    sample_every = opts["sample_every"]

    header = ["step", "t", *system.columns, "H"]
    if system.casimir is not None:
        header.append("C")

    def row_line(k, state):
        values = [f"{k}", _fmt(k * h)]
        values.extend(_fmt(v) for v in state)
        values.append(_fmt(system.hamiltonian(state)))
        if system.casimir is not None:
            values.append(_fmt(system.casimir(state)))
        return ",".join(values)

    out, owns = _open_output(opts.get("output"))
    status = EXIT_OK
    try:
        out.write(",".join(header) + "\n")
        if is_split:
            samples = rigidbody.evolve(
                system.rigid_params, state0, h, steps,
                method=_effective_method(opts), sample_every=sample_every,
            )
            for i in range(samples.shape[0]):
                out.write(row_line(i * sample_every, samples[i]) + "\n")
        else:
            state = state0
            out.write(row_line(0, state) + "\n")
            for n in range(1, steps + 1):
                state = np.asarray(step(state, h), dtype=float)
                if not np.isfinite(state).all():
                    print(f"numerical blow-up at step {n}", file=sys.stderr)
                    status = EXIT_BLOWUP
                    break
                if n % sample_every == 0:
                    out.write(row_line(n, state) + "\n")
    except BlowUpError as exc:
        print(str(exc), file=sys.stderr)
        status = EXIT_BLOWUP
    finally:
        out.flush()
        if owns:
            out.close()
    return status


def _verify_states(opts, system: SystemSpec, count: int) -> np.ndarray:
    rng = np.random.default_rng(opts["seed"])
    if system.name == "rigid_body":
        return verify.sample_states(rng, count, 3, radius_range=(0.5, 2.0))
    return verify.sample_states(rng, count, system.dimension, box=2.0)


def cmd_verify(opts) -> int:
    check = opts.get("check")
    if check is None:
        raise ConfigError("verify needs --check {poisson|symplectic2d|drift:H|drift:C|tableau}")

    if check == "tableau":
        tab = _resolve_tableau(opts, _build_system(opts)) if opts.get("tableau") else None
        if tab is None:
            raise ConfigError("the tableau check needs --tableau")
        residual = integrators.symplectic_condition_residual(tab)
        print(f"tableau symplecticity residual matrix ({tab.stages} stages):")
        for row in residual:
            print("  [" + ", ".join(_fmt(v) for v in row) + "]")
        worst = float(np.max(np.abs(residual)))
        print(f"max |entry| = {_fmt(worst)} (threshold {TABLEAU_CHECK_TOL:g})")
        ok = worst <= TABLEAU_CHECK_TOL
        print("PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    system = _build_system(opts)
    step, _ = _build_step(opts, system)
    h = opts["h"]
    fd_eps = opts["fd_eps"]

    if check == "poisson":
        if system.poisson is None:
            raise ConfigError(f"system {system.name} carries no Poisson structure")
        states = _verify_states(opts, system, POISSON_CHECK_SAMPLES)
        worst = 0.0
        for x in states:
            res = verify.poisson_residual(system.poisson, step, x, h, fd_eps)
            print(f"state ({', '.join(_fmt(v) for v in x)}): residual {_fmt(res)}")
            worst = max(worst, res)
        print(f"max residual = {_fmt(worst)} (threshold {POISSON_CHECK_TOL:g})")
        ok = worst <= POISSON_CHECK_TOL
        print("PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    if check == "symplectic2d":
        if system.dimension != 2:
            raise ConfigError("the symplectic2d check needs a planar system")
        states = _verify_states(opts, system, SYMPLECTIC_CHECK_SAMPLES)
        worst = 0.0
        for x in states:
            res = verify.symplectic_residual_2d(step, x, h, fd_eps)
            print(f"state ({', '.join(_fmt(v) for v in x)}): residual {_fmt(res)}")
            worst = max(worst, res)
        print(f"max residual = {_fmt(worst)} (threshold {SYMPLECTIC_CHECK_TOL:g})")
        ok = worst <= SYMPLECTIC_CHECK_TOL
        print("PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    drift_match = re.match(r"^drift:(H|C)$", check)
    if drift_match:
        which = drift_match.group(1)
        observable = system.hamiltonian if which == "H" else system.casimir
        if observable is None:
            raise ConfigError(f"system {system.name} has no observable {which}")
        state0 = _initial_state(opts, system)
        _check_run_params(opts)
        report = verify.drift(step, observable, state0, h, opts["steps"])
        threshold = DRIFT_CHECK_TOL * max(1.0, abs(float(observable(state0))))
        print(f"observable {which}: initial value {_fmt(observable(state0))}")
        print(f"max |deviation| over {opts['steps']} steps = {_fmt(report.max_abs_deviation)}")
        print(f"final deviation = {_fmt(report.final_deviation)}")
        print(f"threshold = {_fmt(threshold)}")
        ok = report.max_abs_deviation <= threshold
        print("PASS" if ok else "FAIL")
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    raise ConfigError(f"unknown check {check!r}")


def cmd_order(opts) -> int:
    system = _build_system(opts)
    if system.oracle is None:
        raise ConfigError("the order study needs a system with a closed-form oracle (rigid_body)")
    step, _ = _build_step(opts, system)
    state0 = _initial_state(opts, system)
    h_values = opts["h_list"]
    estimate = verify.convergence_order(step, system.oracle, state0, opts["T"], h_values)
    for h, err in zip(estimate.h_values, estimate.errors):
        print(f"h = {_fmt(h)}: global error = {_fmt(err)}")
    slope = estimate.slope
    print(f"fitted slope = {'exact (oracle reproduced)' if math.isinf(slope) else _fmt(slope)}")
    return EXIT_OK


def cmd_eig(opts) -> int:
    system = _build_system(opts)
    if system.rigid_params is None:
        raise ConfigError("the eig report needs the rigid_body system")
    state0 = _initial_state(opts, system)
    prop = rigidbody.step_propagator(system.rigid_params, state0, opts["h"])
    roots = rigidbody.characteristic_roots(prop)
    product = roots[0] * roots[1] * roots[2]
    for i, z in enumerate(roots, start=1):
        print(f"lambda_{i} = {_fmt(z.real)} {'+' if z.imag >= 0 else '-'} {_fmt(abs(z.imag))}i"
              f"  |lambda_{i}| = {_fmt(abs(z))}")
    print(f"product = {_fmt(product.real)} {'+' if product.imag >= 0 else '-'} {_fmt(abs(product.imag))}i")
    moduli_ok = all(abs(abs(z) - 1.0) <= EIG_CHECK_TOL for z in roots)
    product_ok = abs(product - 1.0) <= EIG_CHECK_TOL
    unit_root_ok = min(abs(z - 1.0) for z in roots) <= EIG_CHECK_TOL
    ok = moduli_ok and product_ok and unit_root_ok
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


_DEFAULTS = {
    "method": "lie_trotter",
    "system": "rigid_body",
    "I1": 2.0,
    "I3": 1.0,
    "A": 1.0,
    "B": 1.0,
    "a_coef": 0.5,
    "b_coef": 1.0,
    "m0": None,
    "h": 0.1,
    "steps": 1000,
    "sample_every": 1,
    "seed": 0,
    "fd_eps": 1e-6,
    "output": "-",
    "check": None,
    "tableau": None,
    "h_list": [0.1, 0.05, 0.025, 0.0125],
    "T": 1.0,
    "frozen": False,
}

_FLOAT_KEYS = ("I1", "I3", "A", "B", "a_coef", "b_coef", "h", "fd_eps", "T")
_INT_KEYS = ("steps", "sample_every", "seed")


def _parse_floats(text: str):
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def load_config_file(path: str) -> dict:
    """Flat 'key = value' lines; '#' starts a comment."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    unknown = set(values) - set(_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return values


def _coerce(key: str, value):
    if value is None or not isinstance(value, str):
        return value
    if key in _FLOAT_KEYS:
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"option {key} expects a number, got {value!r}") from exc
    if key in _INT_KEYS:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"option {key} expects an integer, got {value!r}") from exc
    if key == "m0":
        return _parse_floats(value)
    if key == "h_list":
        return _parse_floats(value)
    if key == "frozen":
        return _parse_bool(value)
    return value


def _merge_options(args: argparse.Namespace) -> dict:
    file_values = load_config_file(args.config) if args.config else {}
    opts = {}
    for key, default in _DEFAULTS.items():
        flag_value = getattr(args, key, None)
        if key == "frozen" and flag_value is False:
            flag_value = None  # store_true default; fall through to file/default
        if flag_value is not None:
            opts[key] = _coerce(key, flag_value)
        elif key in file_values:
            opts[key] = _coerce(key, file_values[key])
        else:
            opts[key] = default
    return opts


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="flat key = value option file; flags override it")
    parser.add_argument("--method", help="euler | modified_euler | trapezoid | midpoint | rk | ruth | "
                                         "lie_trotter | lie_trotter_frozen | strang | yoshida<order>")
    parser.add_argument("--system", help="rigid_body | harmonic_oscillator | affine")
    parser.add_argument("--I1", help="transverse inertia moment (rigid_body)")
    parser.add_argument("--I3", help="axial inertia moment (rigid_body)")
    parser.add_argument("--A", help="linear Hamiltonian coefficient (affine system)")
    parser.add_argument("--B", help="linear Hamiltonian coefficient (affine system)")
    parser.add_argument("--a-coef", dest="a_coef", help="one-stage tableau entry a11 (affine system)")
    parser.add_argument("--b-coef", dest="b_coef", help="one-stage tableau weight b1 (affine system)")
    parser.add_argument("--m0", help="comma-separated initial state, e.g. 1,0,1 "
                                     "(use --m0=-1,0,1 when the first entry is negative)")
    parser.add_argument("--h", help="step size (> 0)")
    parser.add_argument("--steps", help="number of steps (>= 1)")
    parser.add_argument("--sample-every", dest="sample_every", help="record every k-th step")
    parser.add_argument("--seed", help="seed for sampled verification states")
    parser.add_argument("--fd-eps", dest="fd_eps", help="finite-difference step for Jacobians")
    parser.add_argument("--output", help="CSV destination path, '-' for stdout")
    parser.add_argument("--check", help="verify check: poisson | symplectic2d | drift:H | drift:C | tableau")
    parser.add_argument("--tableau", help="tableau name or inline JSON {\"a\": [[...]], \"b\": [...]}")
    parser.add_argument("--h-list", dest="h_list", help="comma-separated step sizes for the order study")
    parser.add_argument("--T", help="time horizon for the order study")
    parser.add_argument("--frozen", action="store_true", default=False,
                        help="with lie_trotter: freeze all rotation angles at the step start")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poisint",
        description="Structure-preserving integrators for Poisson systems and their verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("integrate", "run a trajectory and emit CSV"),
        ("verify", "run a structure check"),
        ("order", "measure global-error convergence slopes"),
        ("eig", "report the propagator spectrum"),
    ):
        sp = sub.add_parser(name, help=help_text)
        _add_common_flags(sp)
    return parser


_COMMANDS = {
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "order": cmd_order,
    "eig": cmd_eig,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_options(args)
        return _COMMANDS[args.command](opts)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BlowUpError, integrators.ConvergenceError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_BLOWUP


def console_main():  # pragma: no cover - thin wrapper
    raise SystemExit(main())
