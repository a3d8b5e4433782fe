"""Command-line front end: scans, weak-value extraction, verification.

Subcommands
-----------
scan     sweep the drive frequency and write the resonance curve (CSV/JSON)
extract  recover weak values from susceptibilities and compare to closed forms
verify   run the invariant suite (exit 0 iff everything passes)

Configuration comes from a JSON file (--config) with flags overriding file
values.  All frequencies are angular, hbar = 1.  Complex amplitudes are
written as [re, im] pairs.  Exit codes: 0 ok, 1 verification failure,
2 configuration error, 3 numeric failure.

The environment variable WEAKRES_THREADS caps scan parallelism (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .direct import DirectConfig, extract_complex_weak_value, transition_exact
from .errors import ConfigError, WeakresError
from .pauli import HamiltonianPair, decompose
from .probe import build_truncated_oscillator, build_two_path, ground_state
from .resonance import (
    DEFAULT_EXTRACTION_PROBE,
    RabiParams,
    RamseyParams,
    fwhm,
    rabi_indirect_extract,
    rabi_susceptibility,
    ramsey_indirect_extract,
    ramsey_susceptibility,
    scan as run_scan,
)
from .verify import run_suite
from .weakvalue import SelectionPair, weak_value
from .errors import MultiPeakError, NoPeakError

__all__ = ["main", "RunConfig"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERIC_ERROR = 3


@dataclass
class RunConfig:
    scheme: str = "direct"  # direct | indirect
    scenario: str = "rabi"  # rabi | ramsey | custom
    omega0_bar: float = 1.0
    epsilon: float = 0.0
    omega: float | None = None
    omega_min: float | None = None
    omega_max: float | None = None
    omega_steps: int = 101
    omega1: float = 1.0
    t: float = math.pi / 2
    tau: float = math.pi / 2
    T: float = 1.0
    sign: int = 1
    probe: str = "twopath"  # twopath | oscillator:DIM
    probe_init: list | None = None  # [[re, im], ...]
    pre: list | None = None  # [[re, im], [re, im]]
    post: list | None = None
    operator: list | None = None  # 2x2 of [re, im] (custom scenario)
    out: str | None = None
    format: str = "csv"  # csv | json
    profile: str = "default"  # default | strict

    def validate(self):
        if self.scheme not in ("direct", "indirect"):
            raise ConfigError(f"scheme must be direct|indirect, got {self.scheme!r}", "scheme")
        if self.scenario not in ("rabi", "ramsey", "custom"):
            raise ConfigError(
                f"scenario must be rabi|ramsey|custom, got {self.scenario!r}", "scenario"
            )
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv|json, got {self.format!r}", "format")
        if self.profile not in ("default", "strict"):
            raise ConfigError(f"profile must be default|strict, got {self.profile!r}", "profile")
        if self.sign not in (1, -1):
            raise ConfigError("sign must be +1 or -1", "sign")
        if self.omega1 <= 0:
            raise ConfigError("omega1 must be positive", "omega1")
        if self.scenario == "ramsey" and (self.tau is None or self.T is None):
            raise ConfigError("ramsey runs need tau and T", "tau")
        if self.scheme == "indirect" and self.scenario == "custom":
            raise ConfigError("custom scenario is direct-scheme only", "scheme")
        if not (self.probe == "twopath" or self.probe.startswith("oscillator:")):
            raise ConfigError(
                f"probe must be twopath or oscillator:DIM, got {self.probe!r}", "probe"
            )


def _complex_pairs(raw, n, field_name) -> np.ndarray:
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in raw])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{field_name} must be a list of [re, im] pairs: {exc}", field_name)
    if arr.size != n:
        raise ConfigError(f"{field_name} must have {n} amplitudes, got {arr.size}", field_name)
    return arr


def _build_probe(cfg: RunConfig):
    if cfg.probe == "twopath":
        return build_two_path()
    try:
        dim = int(cfg.probe.split(":", 1)[1])
    except (IndexError, ValueError):
        raise ConfigError(f"bad oscillator probe string {cfg.probe!r}", "probe")
    try:
        return build_truncated_oscillator(dim)
    except ValueError as exc:
        raise ConfigError(str(exc), "probe")


def _probe_init(cfg: RunConfig, probe, purpose: str) -> np.ndarray:
    if cfg.probe_init is not None:
        v = _complex_pairs(cfg.probe_init, probe.dim, "probe_init")
        if np.linalg.norm(v) == 0:
            raise ConfigError("probe_init must be nonzero", "probe_init")
        return v
    if probe.kind == "two_path" and purpose == "extract":
        return np.asarray(DEFAULT_EXTRACTION_PROBE)
    return ground_state(probe)


def _selection(cfg: RunConfig) -> SelectionPair:
    if cfg.pre is None or cfg.post is None:
        raise ConfigError("custom scenario needs pre and post states", "pre")
    pre = _complex_pairs(cfg.pre, 2, "pre")
    post = _complex_pairs(cfg.post, 2, "post")
    nrm = np.linalg.norm(post)
    if nrm == 0:
        raise ConfigError("post state must be nonzero", "post")
    return SelectionPair(pre=pre, post=post / nrm)


def _template(cfg: RunConfig):
    omega = cfg.omega if cfg.omega is not None else cfg.omega0_bar
    if cfg.scenario == "rabi":
        return RabiParams(
            omega0_bar=cfg.omega0_bar,
            epsilon=cfg.epsilon,
            omega=float(omega),
            omega1=cfg.omega1,
            t=cfg.t,
        )
    return RamseyParams(
        omega0_bar=cfg.omega0_bar,
        epsilon=cfg.epsilon,
        omega=float(omega),
        omega1=cfg.omega1,
        tau=cfg.tau,
        T=cfg.T,
    )


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_curve(cfg: RunConfig, curve) -> str | None:
    if cfg.out is None:
        return None
    if cfg.format == "csv":
        lines = [",".join(curve.columns)]
        for row in curve.rows():
            lines.append(",".join(_fmt(x) for x in row))
        payload = "\n".join(lines) + "\n"
    else:
        doc = {
            "columns": curve.columns,
            "rows": [[float(_fmt(x)) for x in row] for row in curve.rows()],
        }
        payload = json.dumps(doc, indent=None, separators=(",", ":")) + "\n"
    with open(cfg.out, "w", newline="") as fh:
        fh.write(payload)
    return cfg.out


def cmd_scan(cfg: RunConfig) -> int:
    cfg.validate()
    if cfg.scenario == "custom":
        raise ConfigError("scan supports rabi and ramsey scenarios", "scenario")
    if cfg.omega_min is None or cfg.omega_max is None:
        raise ConfigError("scan needs omega_min and omega_max", "omega_min")
    if cfg.omega_steps < 1:
        raise ConfigError("omega_steps must be >= 1", "omega_steps")
    if cfg.omega_steps > 1 and not cfg.omega_max > cfg.omega_min:
        raise ConfigError("omega_max must exceed omega_min", "omega_max")
    grid = np.linspace(cfg.omega_min, cfg.omega_max, cfg.omega_steps)
    probe = _build_probe(cfg) if cfg.scheme == "indirect" else None
    if probe is not None and probe.kind != "two_path":
        raise ConfigError("indirect resonance scans use the twopath probe", "probe")
    init = _probe_init(cfg, probe, "scan") if probe is not None else None
    curve = run_scan(
        cfg.scheme, cfg.scenario, _template(cfg), grid, probe_init=init, sign=cfg.sign
    )
    flip = 1.0 - curve.pr_exact
    k = int(np.argmax(flip))
    print(f"scan: scheme={cfg.scheme} scenario={cfg.scenario} rows={grid.size}")
    print(f"peak: omega = {_fmt(curve.omegas[k])} (flipped population {_fmt(flip[k])})")
    try:
        width = fwhm(curve)
        print(f"fwhm: {_fmt(width)}")
    except (NoPeakError, MultiPeakError) as exc:
        print(f"fwhm: n/a ({exc})")
    resid = np.abs(curve.pr_exact - curve.pr_first_order)
    print(f"max |first-order residual|: {_fmt(float(np.max(resid)))}")
    n_valid = int(np.sum(curve.first_order_valid))
    print(f"first-order validity flag set on {n_valid}/{grid.size} rows")
    path = _write_curve(cfg, curve)
    if path:
        print(f"wrote: {path}")
    return EXIT_OK


def _extract_custom(cfg: RunConfig, step: float = 1e-4):
    if cfg.operator is None:
        raise ConfigError("custom extraction needs an operator", "operator")
    try:
        a = np.array(
            [[complex(float(re), float(im)) for re, im in row] for row in cfg.operator]
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"operator must be a 2x2 of [re, im] pairs: {exc}", "operator")
    if a.shape != (2, 2):
        raise ConfigError("operator must be 2x2", "operator")
    sel = _selection(cfg)
    dec = decompose(a)
    a_unit = a / dec.h  # couple at unit strength so eps is the whole coupling
    run = DirectConfig(pair=HamiltonianPair(H0=None, V=decompose(a_unit)), t=1.0, sel=sel)

    def pr(c):
        return transition_exact(run.with_coupling(c)).probability

    scan_r = [(-step, pr(-step)), (0.0, pr(0.0)), (step, pr(step))]
    scan_i = [(-step, pr(-1j * step)), (0.0, pr(0.0)), (step, pr(1j * step))]
    recovered = extract_complex_weak_value(scan_r, scan_i)
    reference = weak_value(a_unit, sel).value
    return recovered, reference, "closed-form weak value of the unit-strength operator"


def cmd_extract(cfg: RunConfig) -> int:
    cfg.validate()
    report: dict = {"scheme": cfg.scheme, "scenario": cfg.scenario}
    if cfg.scenario == "custom":
        recovered, reference, ref_label = _extract_custom(cfg)
        dev = abs(recovered - reference) / max(abs(reference), 1e-300)
        print(f"extracted: Re = {_fmt(recovered.real)}  Im = {_fmt(recovered.imag)}")
        print(f"reference ({ref_label}): Re = {_fmt(reference.real)}  Im = {_fmt(reference.imag)}")
        print(f"relative deviation: {_fmt(dev)}")
        report.update(
            re=recovered.real, im=recovered.imag,
            ref_re=reference.real, ref_im=reference.imag, relative_deviation=dev,
        )
    elif cfg.scheme == "direct":
        template = _template(cfg)
        if cfg.scenario == "rabi":
            rep = rabi_susceptibility(template)
            ref_label = "-cot(phi_rabi)"
        else:
            rep = ramsey_susceptibility(template)
            ref_label = "-cot(phi_ramsey)"
        print(f"extracted Im(weak value): {_fmt(rep.value)}")
        print(f"reference {ref_label}: {_fmt(rep.reference)}")
        print(f"relative deviation: {_fmt(rep.relative_deviation)}")
        print("note: the direct scheme reads only the imaginary part")
        report.update(
            im=rep.value, reference=rep.reference, relative_deviation=rep.relative_deviation
        )
    else:
        template = _template(cfg)
        probe = _build_probe(cfg)
        if probe.kind != "two_path":
            raise ConfigError("indirect resonance extraction uses the twopath probe", "probe")
        init = _probe_init(cfg, probe, "extract")
        if cfg.scenario == "rabi":
            rep = rabi_indirect_extract(template, init, cfg.sign)
            ref_label = "sign * tan(omega1 t)"
        else:
            rep = ramsey_indirect_extract(template, init, cfg.sign)
            ref_label = "sign / cos(omega1 tau)"
        print(f"extracted: Re = {_fmt(rep.recovered.real)}  Im = {_fmt(rep.recovered.imag)}")
        print(f"reference {ref_label}: {_fmt(rep.reference)}")
        print(f"relative deviation: {_fmt(rep.relative_deviation)}")
        report.update(
            re=rep.recovered.real, im=rep.recovered.imag,
            reference=rep.reference, relative_deviation=rep.relative_deviation,
        )
    if cfg.out is not None:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(json.dumps(report, separators=(",", ":")) + "\n")
        print(f"wrote: {cfg.out}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    cfg.validate()
    results = run_suite(cfg.profile)
    failures = [r for r in results if not r.passed]
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        note = f"  [{r.note}]" if r.note else ""
        print(f"{mark}  {r.name}: residual {r.residual:.3e} (tol {r.tolerance:.1e}){note}")
    print(f"{len(results) - len(failures)}/{len(results)} invariants passed ({cfg.profile} profile)")
    if failures:
        for r in failures[:10]:
            print(f"failed: {r.name}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ----------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="weakres",
        description="Rabi/Ramsey resonances as weak-value amplification: scans, "
        "weak-value extraction, and verification.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", metavar="PATH", help="JSON config file")
        sp.add_argument("--out", metavar="PATH", help="output file")
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--scheme", choices=["direct", "indirect"])
        sp.add_argument("--scenario", choices=["rabi", "ramsey", "custom"])
        sp.add_argument("--omega-min", type=float, dest="omega_min")
        sp.add_argument("--omega-max", type=float, dest="omega_max")
        sp.add_argument("--omega-steps", type=int, dest="omega_steps")
        sp.add_argument("--omega", type=float)
        sp.add_argument("--omega0-bar", type=float, dest="omega0_bar")
        sp.add_argument("--epsilon", type=float)
        sp.add_argument("--omega1", type=float)
        sp.add_argument("--t", type=float)
        sp.add_argument("--tau", type=float)
        sp.add_argument("--T", type=float, dest="T")
        sp.add_argument("--sign", type=int, choices=[1, -1])
        sp.add_argument("--probe", help="twopath or oscillator:DIM")
        sp.add_argument("--probe-init", dest="probe_init", help="JSON list of [re, im] pairs")
        sp.add_argument("--pre", help="JSON list of two [re, im] pairs")
        sp.add_argument("--post", help="JSON list of two [re, im] pairs")
        sp.add_argument("--profile", choices=["default", "strict"])

    for name, doc in (
        ("scan", "sweep omega and write the resonance curve"),
        ("extract", "recover weak values from susceptibilities"),
        ("verify", "run the invariant suite"),
    ):
        add_common(sub.add_parser(name, help=doc))
    return p


_JSON_FIELDS = ("probe_init", "pre", "post", "operator")
_FLOAT_FIELDS = ("omega0_bar", "epsilon", "omega", "omega_min", "omega_max", "omega1", "t", "tau", "T")
_INT_FIELDS = ("omega_steps", "sign")


def _coerce(data: dict) -> dict:
    out = dict(data)
    for name in _FLOAT_FIELDS:
        if out.get(name) is not None:
            try:
                out[name] = float(out[name])
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must be a number, got {out[name]!r}", name)
    for name in _INT_FIELDS:
        if out.get(name) is not None:
            try:
                out[name] = int(out[name])
            except (TypeError, ValueError):
                raise ConfigError(f"{name} must be an integer, got {out[name]!r}", name)
    return out


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    known = {f.name for f in fields(RunConfig)}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", "config")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}", "config")
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", "config")
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}", sorted(unknown)[0])
        cfg = replace(cfg, **_coerce(data))
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name in _JSON_FIELDS and isinstance(value, str):
            try:
                value = json.loads(value)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--{f.name} is not valid JSON: {exc}", f.name)
        cfg = replace(cfg, **{f.name: value})
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "scan":
            return cmd_scan(cfg)
        if args.command == "extract":
            return cmd_extract(cfg)
        return cmd_verify(cfg)
    except ConfigError as exc:
        field = f" (field: {exc.field})" if exc.field else ""
        print(f"config error: {exc}{field}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except WeakresError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR


if __name__ == "__main__":
    sys.exit(main())
