"""Batch front-end: ``sawtrap --config run.yaml [--subcommand NAME] ...``

Each subcommand turns a validated config into a rectangular table.  A
``sweep`` list in the config evaluates the subcommand on the Cartesian
product of its axes (first axis slowest); points may run in parallel
but rows are always written in axis order.  Output is a CSV with a
``#``-prefixed metadata header, or the same content as JSON.

Exit codes: 0 success, 1 numerical failure (including any failed sweep
point), 2 configuration error.
"""

import argparse
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import acoustics, hubbard, lattice, molecule, multilayer, saw_field, trapping
from . import config as cfgmod
from .errors import ConfigError, NoTrapError, SawtrapError


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("result rows must match the column count")


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _grid(start, stop, count):
    return np.linspace(start, stop, count) if count > 1 else np.array([start])


# ---- builders -----------------------------------------------------------


def _layer(c):
    L = c["layer"]
    return saw_field.IdtLayer.from_wave_number(
        L["k"],
        periods=L["M"],
        velocity=L["velocity"],
        voltages=(L["V0"], L["V1"], L["V2"]),
        B0=L["B0"],
        index=L["index"],
        gap=L["D"],
    )


def _molecule(c):
    m = c["molecule"]
    return molecule.MoleculeSpec(
        name=m["preset"] or "custom",
        dipole=m["dipole"],
        doublet=m["doublet"],
        J=m["J"],
        m=m["m"],
        Omega=m["Omega"],
        seeker_sign=m["seeker_sign"],
        mass=m["mass"],
        omega1=m["omega1"],
    )


def _profile(c):
    p = c["profile"]
    return trapping.ExternalFieldProfile(
        kind=p["kind"],
        f_E=p["f_E"],
        n=p["n"],
        coefficients=tuple(p["coefficients"]),
        envelope=p["envelope"],
        envelope_rate=p["envelope_rate"],
        z_table=tuple(p["z_table"]),
        e_table=tuple(p["e_table"]),
        regularizer=p["regularizer"],
        gain=p["gain"],
    )


def _stack(c):
    s = c["stack"]
    kw = {k: s[k] for k in ("mass", "trap_frequency", "alpha", "R0", "xi")}
    if s["heights"] is not None:
        return multilayer.LayerStack(tuple(s["heights"]), **kw)
    return multilayer.LayerStack.uniform(s["n"], s["bottom"], s["spacing"], **kw)


def _initial(kind, N, site, seed):
    if kind == "localized":
        return lattice.AmplitudeState.localized(N, site)
    if kind == "uniform":
        return lattice.AmplitudeState.uniform(N)
    return lattice.AmplitudeState.random(N, seed)


def _geometry(c, z, N):
    h = c["hubbard"]
    return hubbard.LatticeGeometry(
        N=int(N),
        width=h["width"],
        z=float(z),
        k=h["k"],
        B0=h["B0"],
        mass=h["mass"],
        wannier_length=h["wannier_length"],
        velocity=h["velocity"],
    )


def _hubbard_grid(c):
    h = c["hubbard"]
    if h["N_max"] < h["N_min"]:
        raise ConfigError("hubbard.N_max", "must be >= hubbard.N_min")
    return _grid(h["z_start"], h["z_stop"], h["z_count"]), range(h["N_min"], h["N_max"] + 1)


# ---- subcommands --------------------------------------------------------


def run_fields(c, seed):
    layer = _layer(c)
    f = c["fields"]
    cols = ["x", "z", "phi_finger", "phi_closed", "Ex", "Ez", "magnitude"]
    rows = []
    t = f["t"]
    for x in _grid(f["x_start"], f["x_stop"], f["x_count"]):
        for z in _grid(f["z_start"], f["z_stop"], f["z_count"]):
            fs = saw_field.field_closed_form(layer, x, z, t)
            rows.append(
                [
                    x,
                    z,
                    float(saw_field.potential_finger_sum(layer, x, z, t)),
                    float(saw_field.potential_closed_form(layer, x, z, t)),
                    float(fs.Ex),
                    float(fs.Ez),
                    float(fs.magnitude),
                ]
            )
    return cols, rows


def run_stark(c, seed):
    spec = _molecule(c)
    L, s, m = c["layer"], c["stark"], c["molecule"]
    u = _grid(s["u_start"], s["u_stop"], s["u_count"])
    env = L["M"] * u * L["k"] * math.exp(-L["k"] * s["z"])
    lv = molecule.stark_levels(spec, env, m["E_Lambda"], m["conversion"])
    rows = [[float(a), float(b), float(hi), float(lo)] for a, b, hi, lo in zip(u, env, lv.upper, lv.lower)]
    return ["u_bar", "envelope", "upper", "lower"], rows


def run_trap_map(c, seed):
    L = c["layer"]
    cols = ["u1", "u2", "z0", "z0_over_D", "status"]
    try:
        eq = trapping.two_layer_equilibrium(L["u1"], L["u2"], L["k"], L["D"])
    except NoTrapError as exc:
        return cols, [[L["u1"], L["u2"], None, None, f"NoTrap:{exc.bound}"]]
    return cols, [[L["u1"], L["u2"], eq.z_star, eq.z_star / L["D"], "Trapped"]]


def run_trap_layers(c, seed):
    p = c["profile"]
    traps = trapping.find_trap_layers(
        _profile(c), _layer(c), _molecule(c), scan_points=p["scan_points"], conversion=c["molecule"]["conversion"]
    )
    return ["z_star", "stability", "residual"], [[t.z_star, t.stability, t.residual_force] for t in traps]


def run_multilayer(c, seed):
    st = _stack(c)
    eb = multilayer.binding_energy(st)
    widths = multilayer.oscillation_widths(st)
    rows = [[i + 1, h, float(w), float(eb)] for i, (h, w) in enumerate(zip(st.heights, widths))]
    return ["layer", "height", "width_R", "binding_energy"], rows


def run_anderson(c, seed):
    a = c["lattice"]
    cfg = lattice.LatticeConfig.chain(a["N"], a["spacing"], a["U0"], a["c"])
    p0 = _initial(a["initial"], a["N"], a["site"], seed)
    tr = lattice.anderson_evolve(cfg, p0, a["T"], method=a["method"], n_samples=a["n_samples"])
    pops = tr.populations()
    rows = []
    for i, t in enumerate(tr.times):
        for n in range(a["N"]):
            rows.append([float(t), n + 1, float(pops[i, n])])
    return ["t", "site", "population"], rows


def run_shielding(c, seed):
    s = c["shielding"]
    cfg = lattice.ShieldingConfig(s["N"], s["V"], s["U0"], s["long_range"], s["gamma"])
    p0 = _initial(s["initial"], s["N"], 1, seed)
    on, off = lattice.shielding_final_states(cfg, p0, s["T"], s["method"])
    dev = float(np.max(np.abs(np.abs(on) ** 2 - np.abs(off) ** 2)))
    rows = [[s["N"], n + 1, float(abs(on[n]) ** 2), float(abs(off[n]) ** 2), dev] for n in range(s["N"])]
    return ["N", "site", "population", "population_no_long_range", "deviation"], rows


def run_hubbard_params(c, seed):
    h = c["hubbard"]
    zs, Ns = _hubbard_grid(c)
    rows = []
    for z in zs:
        for N in Ns:
            p = hubbard.bose_hubbard_params(_geometry(c, z, N), kinetic=h["kinetic"], beta_DeltaU=h["beta_DeltaU"])
            rows.append([float(z), N, p.J, p.U, p.eps, p.J_over_U, p.eps_over_U])
    return ["z", "N", "J", "U", "eps", "J_over_U", "eps_over_U"], rows


def run_phase_diagram(c, seed):
    h = c["hubbard"]
    zs, Ns = _hubbard_grid(c)
    jr = (h["delta_J_min"], h["delta_J_max"])
    er = (h["delta_eps_min"], h["delta_eps_max"])
    base = _geometry(c, zs[0], Ns[0])
    pts = hubbard.phase_diagram(
        zs, Ns, base, h["n0"], h["perturb"], seed, h["kinetic"], h["beta_DeltaU"], jr, er
    )
    if h["perturb"]:
        dJ, dE = hubbard.draw_perturbations((len(zs), len(Ns)), seed, jr, er)
        dJ, dE = dJ.ravel(), dE.ravel()
    else:
        dJ = dE = np.zeros(len(pts))
    cols = ["z", "N", "delta_J", "delta_eps", "J_over_U", "eps_over_U", "phase", "lobe_phase"]
    rows = [
        [p.z, p.N, float(a), float(b), p.J_over_U, p.eps_over_U, p.phase, p.lobe_phase]
        for p, a, b in zip(pts, dJ, dE)
    ]
    return cols, rows


def run_acoustics(c, seed):
    a = c["acoustics"]
    med = acoustics.ElasticMedium(a["kappa"], a["mu"], a["rho"])
    spec = acoustics.PropagationSpec(a["theta"], a["v"])
    rs = acoustics.solve_decay_constants(med, spec)
    rows = [
        [i + 1, float(q.real), float(q.imag), float(r), bool(rs.repeated)]
        for i, (q, r) in enumerate(zip(rs.roots, rs.residuals))
    ]
    return ["root", "q_real", "q_imag", "residual", "repeated"], rows


RUNNERS = {
    "fields": run_fields,
    "stark": run_stark,
    "trap-map": run_trap_map,
    "trap-layers": run_trap_layers,
    "multilayer": run_multilayer,
    "anderson": run_anderson,
    "shielding": run_shielding,
    "hubbard-params": run_hubbard_params,
    "phase-diagram": run_phase_diagram,
    "acoustics": run_acoustics,
}


# ---- execution ----------------------------------------------------------


def _point(args):
    """Worker: one sweep point.  Returns (columns, rows, error)."""
    sub, c, seed = args
    try:
        cols, rows = RUNNERS[sub](c, seed)
        return cols, rows, None
    except ConfigError:
        raise
    except SawtrapError as exc:
        return None, None, f"{type(exc).__name__}: {exc}"
    except (ValueError, ArithmeticError) as exc:
        # library constructors reject inconsistent combinations
        return None, None, f"{type(exc).__name__}: {exc}"


def sweep_points(c):
    axes = c["sweep"]
    if not axes:
        return [], [c]
    values = [_grid(a["start"], a["stop"], a["count"]) for a in axes]
    names = [a["name"] for a in axes]
    pts = []
    for combo in itertools.product(*values):
        cc = c
        for n, v in zip(names, combo):
            cc = cfgmod.set_path(cc, n, v)
        pts.append(cc)
    return names, pts


def run(c, jobs=1):
    """Evaluate the configured subcommand (and sweep) into one ResultTable.

    Returns ``(table, n_failed)``.
    """
    sub = c["subcommand"]
    if sub is None:
        raise ConfigError("subcommand", "no subcommand given (config or --subcommand)")
    seed = c["seed"]
    names, pts = sweep_points(c)
    work = [(sub, p, seed) for p in pts]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_point, work))  # map keeps submission order
    else:
        results = [_point(w) for w in work]

    data_cols = next((r[0] for r in results if r[0] is not None), None)
    failed = sum(1 for r in results if r[2] is not None)
    if data_cols is None:
        data_cols = []
    columns = list(names) + list(data_cols) + (["error"] if failed else [])
    rows = []
    for p, (cols, body, err) in zip(pts, results):
        prefix = [p[n.partition(".")[0]][n.partition(".")[2]] for n in names]
        if err is not None:
            rows.append(prefix + [None] * len(data_cols) + [err])
            continue
        for r in body:
            rows.append(prefix + list(r) + ([None] if failed else []))
    meta = {
        "tool": "sawtrap",
        "version": __version__,
        "subcommand": sub,
        "seed": seed,
        "config_hash": cfgmod.config_hash(c),
        "schema_version": cfgmod.SCHEMA_VERSION,
    }
    return ResultTable(columns, rows, meta), failed


def to_csv(table: ResultTable):
    lines = [f"# {k}: {table.metadata[k]}" for k in sorted(table.metadata)]
    lines.append(",".join(table.columns))
    for r in table.rows:
        cells = []
        for v in r:
            s = fmt(v)
            if any(ch in s for ch in ',"\n'):
                s = '"' + s.replace('"', '""') + '"'
            cells.append(s)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return None if math.isnan(float(v)) else float(v)
    return v


def to_json(table: ResultTable):
    doc = {
        "metadata": table.metadata,
        "columns": table.columns,
        "rows": [[_jsonable(v) for v in r] for r in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def write(table, out_dir, fmt_name):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "json" if fmt_name == "json" else "csv"
    path = out / f"{table.metadata['subcommand']}.{ext}"
    text = to_json(table) if ext == "json" else to_csv(table)
    path.write_text(text, encoding="utf-8")
    return path


def build_parser():
    ap = argparse.ArgumentParser(prog="sawtrap", description="SAW molecule-trap simulations")
    ap.add_argument("--config", help="YAML config file (defaults used if omitted)")
    ap.add_argument("--subcommand", choices=cfgmod.SUBCOMMANDS, help="overrides the config's subcommand")
    ap.add_argument("--seed", type=int, help="overrides the config's seed")
    ap.add_argument("--out", help="output directory (overrides config 'output')")
    ap.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    ap.add_argument("--format", choices=("csv", "json"), help="output format (overrides config)")
    ap.add_argument("--version", action="version", version=f"sawtrap {__version__}")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        c = cfgmod.load(args.config) if args.config else cfgmod.default_config()
        if args.subcommand:
            c["subcommand"] = args.subcommand
        if args.seed is not None:
            if not 0 <= args.seed <= cfgmod.MAX_SEED:
                raise ConfigError("seed", "must be in [0, 2^64)")
            c["seed"] = args.seed
        if args.format:
            c["format"] = args.format
        if args.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        table, failed = run(c, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SawtrapError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    path = write(table, args.out or c["output"], c["format"])
    print(f"wrote {path} ({len(table.rows)} rows)")
    if failed:
        print(f"{failed} point(s) failed; see the error column", file=sys.stderr)
        return 1
    return 0
