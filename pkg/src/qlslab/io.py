"""Run configuration, checkpoints, CSV output and run orchestration."""

from __future__ import annotations

import configparser
import csv
import json
import logging
import math
import platform
import re
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import diagnostics as dg
from . import grid as gs
from . import interaction as ia
from . import scattering as sc
from .checker import HypothesisError, sobolev_constant
from .grid import Grid
from .nonlinearity import FSpec, HSpec, ModelSpec, PotentialSpec
from .solver import ConfigError, DivergedError, Problem, SolverConfig, run

__all__ = [
    "RunConfig",
    "parse_config",
    "load_config",
    "initial_field",
    "write_checkpoint",
    "read_checkpoint",
    "write_records_csv",
    "read_csv",
    "export_plotdata",
    "orchestrate",
    "RunResult",
    "MAGIC",
    "CSV_HEADER",
]

log = logging.getLogger(__name__)

MAGIC = "QLSLAB-CHECKPOINT"
CHECKPOINT_VERSION = 1
CSV_HEADER = dg.RECORD_FIELDS

FUNCTIONALS = ("records", "morawetz", "interaction1d", "scattering", "mb")

SCHEMA = {
    "model": {
        "dim": ("int", 1), "h": ("str", "none"), "alpha": ("float", 1.0), "f": ("str", ""),
        "v_kind": ("str", "zero"), "v_a": ("float", 0.0), "v_m": ("float", 1.0), "v_eps": ("optfloat", None),
        "w_kind": ("str", "zero"), "w_a": ("float", 0.0), "w_m": ("float", 1.0), "w_eps": ("optfloat", None),
    },
    "grid": {"M": ("int", 256), "L": ("float", 20.0)},
    "solver": {
        "dt": ("float", 1e-3), "t_end": ("float", 1.0), "scheme": ("str", "strang"),
        "sample_every": ("int", 10), "boundary_mass_tol": ("float", 1e-8),
        "strict_boundary": ("bool", False),
    },
    "diagnostics": {
        "functionals": ("list", ["records"]), "checkpoints": ("floatlist", []),
        "weight": ("str", "constant"), "theta": ("float", 1.0), "sigma": ("float", 0.0),
        "k": ("float", 2.0), "b0": ("float", 0.0), "c0": ("float", 0.0), "radial": ("bool", False),
        "erf_eps": ("float", 0.5), "r0": ("optfloat", None), "sobolev_constant": ("optfloat", None),
    },
    "initial": {
        "kind": ("str", "gaussian"), "amplitude": ("float", 1.0), "width": ("float", 1.0),
        "center": ("floatlist", []), "momentum": ("floatlist", []), "seed": ("int", 0),
    },
    "run": {"output": ("str", "run"), "seed": ("int", 0), "workers": ("int", 1)},
    "check": {
        "mass": ("optfloat", None), "energy": ("optfloat", None), "p": ("float", 1.0),
        "theta": ("float", 1.0), "weight": ("str", "constant"), "cr": ("float", 0.0),
        "r": ("optfloat", None), "q": ("optfloat", None), "normalization": ("str", "monomial"),
    },
}


class ConfigParseError(ConfigError):
    """Malformed configuration text; carries the offending line."""

    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


@dataclass
class RunConfig:
    model: ModelSpec
    grid: Grid
    solver: SolverConfig
    diagnostics: dict
    initial: dict
    run: dict
    check: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {k: dict(v) for k, v in self.raw.items()}


def _line_of(text: str, section: str | None, key: str | None) -> int | None:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.fullmatch(r"\[([^\]]+)\]", s)
        if m:
            cur = m.group(1).strip()
            if key is None and cur == section:
                return i
            continue
        if key is not None and cur == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


def _convert(kind, raw, where):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "optfloat":
            return None if raw.lower() in ("", "none") else float(raw)
        if kind == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "list":
            return [s.strip() for s in raw.split(",") if s.strip()]
        if kind == "floatlist":
            return [float(s) for s in raw.split(",") if s.strip()]
        return raw
    except ValueError:
        raise ConfigParseError(f"cannot read {where} = {raw!r} as {kind}", None) from None


def _parse_f(raw: str) -> FSpec:
    terms = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        b, _, beta = item.partition(":")
        terms.append((float(b), float(beta)))
    return FSpec(tuple(terms))


def parse_config(text: str) -> RunConfig:
    """Parse and validate ``key = value`` text with ``[section]`` headers.

    Unknown sections or keys are errors. Every default that was filled in
    is recorded in ``RunConfig.raw``.
    """
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigParseError(f"syntax error: {e.errors[0][1].strip() if e.errors else e}", line) from None
    except configparser.MissingSectionHeaderError as e:
        raise ConfigParseError("key outside any [section]", e.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
        raise ConfigParseError(str(e).split(": ", 1)[-1], e.lineno) from None
    values = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigParseError(f"unknown section [{sec}]", _line_of(text, sec, None))
        for key in cp[sec]:
            if key not in SCHEMA[sec]:
                raise ConfigParseError(f"unknown key {key!r} in [{sec}]", _line_of(text, sec, key))
    for sec, keys in SCHEMA.items():
        values[sec] = {}
        for key, (kind, default) in keys.items():
            if cp.has_option(sec, key):
                try:
                    values[sec][key] = _convert(kind, cp[sec][key].strip(), f"{sec}.{key}")
                except ConfigParseError as e:
                    raise ConfigParseError(str(e), _line_of(text, sec, key)) from None
            else:
                values[sec][key] = default
    return _build(values)


def _build(values: dict) -> RunConfig:
    mv = values["model"]
    try:
        h = HSpec(mv["h"], mv["alpha"]) if mv["h"] != "none" else HSpec()
        f = _parse_f(mv["f"])
        v = PotentialSpec(mv["v_kind"], mv["v_a"], mv["v_m"], mv["v_eps"])
        w = PotentialSpec(mv["w_kind"], mv["w_a"], mv["w_m"], mv["w_eps"])
        model = ModelSpec(mv["dim"], h, f, v, w)
        grid = Grid(mv["dim"], values["grid"]["M"], values["grid"]["L"])
        sv = values["solver"]
        solver = SolverConfig(sv["dt"], sv["t_end"], sv["scheme"], sv["sample_every"],
                              sv["boundary_mass_tol"], sv["strict_boundary"])
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None
    _cross_validate(model, grid, solver, values)
    return RunConfig(model, grid, solver, values["diagnostics"], values["initial"], values["run"],
                     values["check"], values)


def _cross_validate(model, grid, solver, values):
    if solver.scheme == "strang" and model.delta != 0:
        raise ConfigError("strang requires δ_h = 0")
    if model.delta != 0 and model.h.alpha < 1.0:
        raise ConfigError("quasilinear runs require alpha >= 1")
    if solver.scheme == "ifrk4":
        margin = solver.dt * grid.k2max
        if margin > 40.0:
            raise ConfigError(f"dt·max|k|² = {margin:.4g} exceeds 40 (solver.dt vs grid.M, grid.L)")
    d = values["diagnostics"]
    for fn in d["functionals"]:
        if fn not in FUNCTIONALS:
            raise ConfigError(f"unknown functional {fn!r}")
    for t in d["checkpoints"]:
        if t < 0 or t > solver.t_end + 1e-12:
            raise ConfigError(f"checkpoint t = {t} outside [0, solver.t_end]")
    if "interaction1d" in d["functionals"]:
        if model.dim != 1:
            raise ConfigError("interaction1d needs model.dim = 1")
        if d["erf_eps"] < 2 * grid.dx:
            raise ConfigError("diagnostics.erf_eps below two grid spacings")
    if d["r0"] is not None and d["r0"] < grid.dx:
        raise ConfigError("diagnostics.r0 below one grid spacing")
    if values["initial"]["kind"] not in ("gaussian", "plane-wave", "random"):
        raise ConfigError(f"unknown initial kind {values['initial']['kind']!r}")


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def initial_field(cfg: RunConfig) -> np.ndarray:
    """Sample the configured initial datum on the grid."""
    g = cfg.grid
    ic = cfg.initial
    N = g.dim
    center = (list(ic["center"]) + [0.0] * N)[:N]
    mom = (list(ic["momentum"]) + [0.0] * N)[:N]
    phase = sum(k * x for k, x in zip(mom, g.coords))
    A = ic["amplitude"]
    if ic["kind"] == "plane-wave":
        return A * np.exp(1j * phase) * np.ones(g.shape)
    r2 = sum((x - c) ** 2 for x, c in zip(g.coords, center))
    env = A * np.exp(-r2 / (2.0 * ic["width"] ** 2))
    if ic["kind"] == "gaussian":
        return env * np.exp(1j * phase)
    rng = np.random.default_rng(ic["seed"])
    noise = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    smooth = gs.ifft(gs.fft(noise) * np.exp(-g.k2))
    smooth = smooth / np.max(np.abs(smooth))
    return env * (1.0 + 0.5 * smooth)


# -- checkpoints ------------------------------------------------------------

def write_checkpoint(path, grid: Grid, u, t: float) -> None:
    """Text header line, then little-endian complex128 samples in row-major order."""
    u = np.ascontiguousarray(grid.check(u), dtype="<c16")
    header = f"{MAGIC} {CHECKPOINT_VERSION} {grid.dim} {grid.M} {grid.L!r} {float(t)!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(u.tobytes(order="C"))


def read_checkpoint(path):
    """Return ``(grid, u, t)``."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        payload = fh.read()
    if len(header) != 6 or header[0] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    if int(header[1]) != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {header[1]}")
    N, M = int(header[2]), int(header[3])
    grid = Grid(N, M, float(header[4]))
    if len(payload) != 16 * M ** N:
        raise ValueError(f"{path}: payload has {len(payload)} bytes, expected {16 * M ** N}")
    u = np.frombuffer(payload, dtype="<c16").reshape(grid.shape).astype(complex)
    return grid, u, float(header[5])


# -- CSV ----------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) for x in r])


def write_records_csv(path, records) -> None:
    write_rows(path, CSV_HEADER, (r.as_row() for r in records))


def read_csv(path) -> dict:
    """Columns of a numeric CSV file with a header row."""
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header is None:
            return {}
        rows = [[float(x) for x in r] for r in rd if r]
    arr = np.array(rows, dtype=float).reshape(-1, len(header))
    return {h: arr[:, j] for j, h in enumerate(header)}


def export_plotdata(cols: dict, x: str = "t", y: str = "phi", mode: str = "loglog",
                    window: tuple | None = None) -> str:
    """Plot-ready two-column text; ``slope-fit`` embeds the decay fit."""
    if mode not in ("loglog", "linear", "slope-fit"):
        raise ValueError(f"unknown mode {mode!r}")
    if not cols or x not in cols or len(cols[x]) == 0:
        return ""
    xs, ys = cols[x], cols[y]
    lines = []
    if mode == "slope-fit":
        fit = dg.decay_fit(xs, ys, window)
        lines.append(f"# slope = {-fit.iota:.6f} on [{fit.t_lo:g}, {fit.t_hi:g}] (n = {fit.n})")
    sel = np.ones(len(xs), dtype=bool)
    if window is not None:
        sel = (xs >= window[0]) & (xs <= window[1])
    if mode in ("loglog", "slope-fit"):
        sel &= (xs > 0) & (ys > 0)
        lines.append(f"# log10({x}) log10({y})")
        lines += [f"{float(np.log10(a))!r} {float(np.log10(b))!r}" for a, b in zip(xs[sel], ys[sel])]
    else:
        lines.append(f"# {x} {y}")
        lines += [f"{float(a)!r} {float(b)!r}" for a, b in zip(xs[sel], ys[sel])]
    return "\n".join(lines) + "\n"


# -- orchestration ----------------------------------------------------------

@dataclass
class RunResult:
    status: str
    exit_code: int
    outdir: Path
    message: str = ""
    trajectory: object = None


def _weight(d) -> dg.WeightSpec:
    return dg.WeightSpec(d["weight"], d["theta"], d["sigma"], d["k"], d["b0"], d["c0"], d["radial"])


def orchestrate(cfg: RunConfig, outdir=None) -> RunResult:
    """Run the solver with the configured observers and write all artifacts."""
    out = Path(outdir if outdir is not None else cfg.run["output"])
    out.mkdir(parents=True, exist_ok=True)
    gs.set_workers(cfg.run["workers"])
    timings = {}
    t0 = time.perf_counter()
    problem = Problem(cfg.model, cfg.grid)
    u0 = initial_field(cfg)
    d = cfg.diagnostics
    fns = set(d["functionals"])
    observers = [dg.Recorder(problem)]
    names = ["records"]
    weight = None
    if "morawetz" in fns:
        weight = _weight(d)
        from .nonlinearity import classify_constants
        cc = classify_constants(cfg.model)
        try:
            dg.validate_weight(weight, weight.estimate, cfg.model.dim, l=cc.l,
                               defocusing=cfg.model.defocusing)
        except HypothesisError as e:
            return RunResult("hypothesis-rejected", 4, out, str(e))
        observers.append(dg.MorawetzObserver(problem, weight))
        names.append("morawetz")
    if "interaction1d" in fns:
        eps = d["erf_eps"]
        observers.append(lambda st: (ia.action_1d(problem.grid, st.u, eps),
                                     ia.identity_rhs_1d(problem, st.u, eps)["total"],
                                     ia.lhs_density_1d(problem, st.u)))
        names.append("interaction1d")
    if "mb" in fns:
        observers.append(lambda st: sc.h_norm_sq(problem.grid, st.u, st.t))
        names.append("mb")
    checkpoints = list(d["checkpoints"])
    timings["setup"] = time.perf_counter() - t0
    status, code, msg = "ok", 0, ""
    t1 = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", gs.BoundaryMassWarning)
            try:
                traj = run(problem, cfg.solver, u0, observers, checkpoints)
            finally:
                diag_warnings = _summarise_warnings(caught)
    except DivergedError as e:
        traj = e.trajectory
        status, code, msg = "diverged", 3, str(e)
    timings["run"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    if traj is not None:
        _write_outputs(cfg, problem, traj, names, out, u0, weight)
    timings["write"] = time.perf_counter() - t2
    _write_manifest(cfg, out, status, msg, timings, traj, diag_warnings)
    return RunResult(status, code, out, msg, traj)


def _write_outputs(cfg, problem, traj, names, out, u0, weight):
    obs = dict(zip(names, traj.observations))
    write_records_csv(out / "records.csv", obs["records"])
    t = traj.times[: len(obs["records"])]
    if "morawetz" in obs:
        vals = obs["morawetz"]
        acc = np.concatenate([[0.0], np.cumsum(0.5 * (np.add(vals[1:], vals[:-1])) * np.diff(t))]) if vals else []
        write_rows(out / "morawetz.csv", ("t", "integrand", "accumulated"), zip(t, vals, acc))
    if "interaction1d" in obs:
        write_rows(out / "interaction1d.csv", ("t", "M_a", "rhs", "lhs_density"),
                   ((tt, *v) for tt, v in zip(t, obs["interaction1d"])))
    if "mb" in obs:
        write_rows(out / "mb.csv", ("t", "h_norm_sq"), zip(t, obs["mb"]))
    for tc, u in sorted(traj.snapshots.items()):
        write_checkpoint(out / f"checkpoint_t{tc:g}.bin", cfg.grid, u, tc)
    if "scattering" in cfg.diagnostics["functionals"] and len(traj.snapshots) >= 2:
        series = sc.cauchy_gaps(cfg.grid, traj.snapshots)
        write_rows(out / "gaps.csv", ("t_i", "t_j", "l2", "h1", "x", "sigma"), series.rows())


def _summarise_warnings(caught) -> dict:
    """Log each distinct boundary warning once; re-issue any other warning."""
    counts = {}
    for w in caught:
        if issubclass(w.category, gs.BoundaryMassWarning):
            counts[str(w.message)] = counts.get(str(w.message), 0) + 1
        else:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    for text, n in counts.items():
        log.warning("%s (%d occurrences)", text, n)
    return counts


def _write_manifest(cfg, out, status, msg, timings, traj, diag_warnings=None):
    N = cfg.model.dim
    cs = cfg.diagnostics["sobolev_constant"]
    if cs is None and N >= 3:
        cs = sobolev_constant(N)
    man = {
        "status": status,
        "message": msg,
        "config": cfg.echo(),
        "versions": {"qlslab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "constants": {
            "sobolev_constant": cs,
            "v_eps": cfg.model.v.eps if cfg.model.v.eps is not None else cfg.grid.dx,
            "w_eps": cfg.model.w.eps if cfg.model.w.eps is not None else cfg.grid.dx,
            "r0": cfg.diagnostics["r0"],
            "erf_eps": cfg.diagnostics["erf_eps"],
        },
        "boundary_warnings": [list(w) for w in (traj.boundary_warnings if traj else [])][:20],
        "diagnostic_warnings": dict(sorted((diag_warnings or {}).items())),
        "samples": len(traj.times) if traj else 0,
        "timings": timings,
    }
    (out / "manifest.json").write_text(json.dumps(man, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    if hasattr(o, "__dataclass_fields__"):
        return asdict(o)
    return str(o)
