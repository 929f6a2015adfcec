"""Batch front end: ``pwsample <subcommand> [flags] --out DIR``.

Every run writes its CSV outputs and a ``run.manifest`` (``key=value`` lines)
into the output directory.  ``pwsample replay DIR/run.manifest --out NEW``
re-executes the recorded argument vector.

Exit codes: 0 success, 2 usage error, 3 domain violation or unreadable input,
4 ill-conditioned section or solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, _backend
from .biorth import BiorthSystem, G_eval, biorth_residual
from .errors import DomainError, IllConditionedError
from .gram import build_section, frame_bound_estimates, perturbation_bound, section_B
from .kadec import admissibility, criteria_for, sweep
from .kernels import SmoothKernel
from .nodes import MODES, deviation_stats, gen_perturbed, read_nodes_csv, write_nodes_csv
from .reconstruct import (
    PERTURB_MODES,
    default_grid,
    parse_grid,
    reconstruct_oversampled,
    reconstruct_sinc,
    sample,
    stability_bound,
    with_truth,
)
from .svg import emit_svg
from .testfn import make_random, read_function_csv

__all__ = ["build_parser", "run", "main", "emit_svg"]

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_SOLVER = 4

_PATH_FLAGS = ("--nodes", "--f")
# values such as "-5:5:0.1" or "-1,2" would otherwise be taken for flags
_GLUED_FLAGS = ("--grid", "--n", "--perturb")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _child_seeds(seed, n):
    """Independent integer seeds derived from the single run seed."""
    ss = np.random.SeedSequence(seed)
    return [int(c.generate_state(1)[0]) for c in ss.spawn(n)]


def _node_flags(p, W=40):
    g = p.add_argument_group("nodes")
    g.add_argument("--nodes", metavar="FILE", help="node CSV (k,n_1..n_d,t_1..t_d); overrides generation flags")
    g.add_argument("--d", type=int, default=1, help="dimension")
    g.add_argument("--W", type=int, default=W, help="window radius")
    g.add_argument("--mode", choices=MODES, default="lattice")
    g.add_argument("--delta", type=float, default=0.0)
    g.add_argument("--rho", type=float, default=None)
    g.add_argument("--D", type=float, default=None, help="displacement for --mode single")


def _kernel_flags(p):
    p.add_argument("--lambda0", type=float, default=1.5)
    p.add_argument("--quad-order", type=int, default=64)


def build_parser():
    p = argparse.ArgumentParser(prog="pwsample", description="Nonuniform sampling experiments with CSV output.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--out", default=".", metavar="DIR", help="output directory (created if missing)")
        sp.add_argument("--seed", type=int, default=0, help="root seed for every random choice")
        return sp

    sp = add("nodes", "generate a node window and its deviation statistics")
    _node_flags(sp)

    sp = add("gram", "dump a Gram section and its inverse")
    _node_flags(sp)
    sp.add_argument("--l", type=int, required=True, help="section size")

    sp = add("reconstruct", "sample a bandlimited function and reconstruct it")
    _node_flags(sp)
    _kernel_flags(sp)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0, help="1 selects the SINC formula")
    sp.add_argument("--f", metavar="FILE", help="function CSV (c,s_1..s_d)")
    sp.add_argument("--random", type=int, default=7, metavar="K", help="random function with K centers when --f is absent")
    sp.add_argument("--spread", type=float, default=5.0)
    sp.add_argument("--lattice-centers", action="store_true", help="draw integer centers")
    sp.add_argument("--grid", metavar="a:b:step")
    sp.add_argument("--perturb", metavar="eps,mode", help=f"sample noise, mode in {PERTURB_MODES}")
    sp.add_argument("--svg", action="store_true", help="also plot abs_err (d = 1)")

    sp = add("kadec", "Riesz-basis criteria: thresholds, sweeps or a node window")
    _node_flags(sp)
    sp.add_argument("--L", type=float, default=None, help="sup deviation to test directly")
    sp.add_argument("--sweep", type=int, default=None, metavar="DMAX")
    sp.add_argument("--svg", action="store_true", help="plot the sweep ratio")

    sp = add("biorth", "biorthogonal functions of a one-dimensional system")
    _node_flags(sp)
    sp.add_argument("--l", type=int, default=None, help="truncation level (default W)")
    sp.add_argument("--n", default="0", metavar="I[,J..]", help="indices to evaluate")
    sp.add_argument("--grid", default="-5:5:0.1", metavar="a:b:step")
    sp.add_argument("--residual", type=int, default=None, metavar="M")
    sp.add_argument("--svg", action="store_true")

    sp = add("stability", "pointwise coefficient-perturbation bound")
    _node_flags(sp)
    _kernel_flags(sp)
    sp.add_argument("--l", type=int, default=None)
    sp.add_argument("--lambda", dest="lam", type=float, default=2.0)
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--grid", metavar="a:b:step")
    sp.add_argument("--svg", action="store_true")

    sp = sub.add_parser("replay", help="re-run a recorded manifest")
    sp.add_argument("manifest")
    sp.add_argument("--out", required=True, metavar="DIR")
    return p


def _validate(a):
    for name in ("delta", "rho", "D", "lam", "lambda0", "L", "eps", "spread"):
        v = getattr(a, name, None)
        if v is not None and not np.isfinite(v):
            raise DomainError(f"--{name} must be finite")
    if a.nodes is None:
        if a.d < 1:
            raise DomainError("--d must be >= 1")
        if a.W < 0:
            raise DomainError("--W must be >= 0")
    if getattr(a, "l", None) is not None and a.l < 1:
        raise DomainError("--l must be >= 1")
    if getattr(a, "lam", None) is not None and a.lam < 1:
        raise DomainError("--lambda must be >= 1")
    if getattr(a, "quad_order", 1) < 1:
        raise DomainError("--quad-order must be >= 1")
    if getattr(a, "eps", 0.0) < 0:
        raise DomainError("--eps must be non-negative")
    if getattr(a, "sweep", None) is not None and a.sweep < 1:
        raise DomainError("--sweep must be >= 1")
    if getattr(a, "residual", None) is not None and a.residual < 0:
        raise DomainError("--residual must be >= 0")


def _load_nodes(a, seed):
    if a.nodes is not None:
        return read_nodes_csv(a.nodes)
    return gen_perturbed(a.d, a.W, a.mode, delta=a.delta, rho=a.rho, seed=seed, displacement=a.D)


def _check_l(ns, l):
    if l > len(ns):
        raise DomainError(f"--l {l} exceeds the {len(ns)} nodes of the window")


def _grid(a, ns):
    return default_grid(ns) if a.grid is None else parse_grid(a.grid, ns.dim)


def _cmd_nodes(a, out, seeds):
    ns = _load_nodes(a, seeds[0])
    write_nodes_csv(ns, out / "nodes.csv")
    stats = deviation_stats(ns)
    _write_csv(out / "deviations.csv", ["shell", "tail_dev"], stats.tail_dev)
    return {"N": len(ns), "sup_dev": stats.sup_dev}


def _cmd_gram(a, out, seeds):
    ns = _load_nodes(a, seeds[0])
    _check_l(ns, a.l)
    sec = build_section(ns, a.l)
    inv = section_B(sec).matrix
    cols = [f"m_{j + 1}" for j in range(a.l)]
    _write_csv(out / "gram.csv", cols, sec.matrix)
    _write_csv(out / "gram_inverse.csv", cols, inv)
    lo, hi = frame_bound_estimates(sec)
    L = deviation_stats(ns).sup_dev
    summary = [
        ("l", a.l),
        ("condition", sec.condition),
        ("eig_min", lo),
        ("eig_max", hi),
        ("sup_dev", L),
        ("perturbation_bound", perturbation_bound(L, ns.dim)),
    ]
    _write_csv(out / "gram_summary.csv", ["key", "value"], summary)
    return dict(summary)


def _parse_perturb(text):
    try:
        eps, mode = text.split(",")
        return float(eps), mode.strip()
    except ValueError:
        raise DomainError(f"--perturb {text!r} is not eps,mode") from None


def _cmd_reconstruct(a, out, seeds):
    ns = _load_nodes(a, seeds[0])
    _check_l(ns, a.l)
    if a.f is not None:
        f = read_function_csv(a.f)
    else:
        if a.random < 1:
            raise DomainError("--random must be >= 1")
        f = make_random(seeds[1], a.random, ns.dim, a.spread, lattice=a.lattice_centers)
    grid = _grid(a, ns)
    perturb = None if a.perturb is None else _parse_perturb(a.perturb)
    samples = sample(f, ns, a.l, lam=a.lam, perturb=perturb, seed=seeds[2])
    if a.lam == 1:
        res = reconstruct_sinc(ns, a.l, samples, grid)
        method = "sinc"
    else:
        kernel = SmoothKernel(ns.dim, a.lambda0, a.quad_order)
        res = reconstruct_oversampled(ns, a.l, samples, kernel, grid)
        method = "oversampled"
    res = with_truth(res, f)
    err = np.abs(res.values - res.truth)
    header = [f"t_{i + 1}" for i in range(ns.dim)] + ["f_true", "f_rec", "abs_err"]
    rows = np.column_stack([res.grid, res.truth, res.values, err])
    _write_csv(out / "reconstruct.csv", header, rows)
    if a.svg and ns.dim == 1:
        emit_svg({"abs_err": np.column_stack([res.grid[:, 0], err])}, out / "reconstruct.svg",
                 xlabel="t", ylabel="abs_err")
    return {"method": method, "sup_err": res.metrics.sup, "rms_err": res.metrics.rms}


def _cmd_kadec(a, out, seeds):
    if a.sweep is not None:
        rows = sweep(a.sweep)
        _write_csv(out / "kadec_sweep.csv", ["d", "ln2_bound", "x_d", "ratio"], rows)
        if a.svg:
            emit_svg({"ratio": [(r[0], r[3]) for r in rows]}, out / "kadec_sweep.svg", xlabel="d", ylabel="ratio")
        return {"rows": len(rows)}
    if a.L is not None:
        rep = criteria_for(a.L, a.d)
    else:
        rep = admissibility(_load_nodes(a, seeds[0]))
    _write_csv(out / "kadec.csv", ["key", "value"], rep.rows())
    return {"sun_zhou_pass": rep.sun_zhou_pass, "ln2_pass": rep.ln2_pass}


def _cmd_biorth(a, out, seeds):
    ns = _load_nodes(a, seeds[0])
    l = ns.window_radius if a.l is None else a.l
    system = BiorthSystem.from_nodeset(ns, l)
    try:
        idx = [int(s) for s in a.n.split(",")]
    except ValueError:
        raise DomainError(f"--n {a.n!r} is not a comma-separated index list") from None
    t = parse_grid(a.grid, 1)[:, 0]
    cols = [G_eval(n, t, system) for n in idx]
    _write_csv(out / "biorth.csv", ["t"] + [f"G_{n}" for n in idx], np.column_stack([t] + cols))
    result = {"l": l}
    if a.residual is not None:
        R = biorth_residual(system, a.residual)
        M = a.residual
        _write_csv(out / "biorth_residual.csv", ["m"] + [f"n_{n}" for n in range(-M, M + 1)],
                   [[m] + list(row) for m, row in zip(range(-M, M + 1), R)])
        result["max_residual"] = float(np.abs(R).max())
    if a.svg:
        emit_svg({f"G_{n}": np.column_stack([t, c]) for n, c in zip(idx, cols)}, out / "biorth.svg", xlabel="t")
    return result


def _cmd_stability(a, out, seeds):
    ns = _load_nodes(a, seeds[0])
    l = len(ns) if a.l is None else a.l
    _check_l(ns, l)
    kernel = SmoothKernel(ns.dim, a.lambda0, a.quad_order)
    if a.lam < kernel.lambda0:
        raise DomainError(f"--lambda {a.lam} must be >= --lambda0 {kernel.lambda0}")
    grid = _grid(a, ns)
    bound = stability_bound(a.eps, grid, ns, a.lam, kernel, l=l)
    header = [f"t_{i + 1}" for i in range(ns.dim)] + ["bound"]
    _write_csv(out / "stability.csv", header, np.column_stack([grid, bound]))
    if a.svg and ns.dim == 1:
        emit_svg({"bound": np.column_stack([grid[:, 0], bound])}, out / "stability.svg", xlabel="t")
    return {"max_bound": float(np.max(bound))}


_COMMANDS = {
    "nodes": _cmd_nodes,
    "gram": _cmd_gram,
    "reconstruct": _cmd_reconstruct,
    "kadec": _cmd_kadec,
    "biorth": _cmd_biorth,
    "stability": _cmd_stability,
}


def _glue_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _GLUED_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _absolute_inputs(argv):
    """Copy of ``argv`` with input-file flags resolved against the current directory."""
    out = list(argv)
    for i, tok in enumerate(out):
        for flag in _PATH_FLAGS:
            if tok == flag and i + 1 < len(out):
                out[i + 1] = str(Path(out[i + 1]).resolve())
            elif tok.startswith(flag + "="):
                out[i] = f"{flag}={Path(tok[len(flag) + 1:]).resolve()}"
    return out


def _strip_out(argv):
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
        elif tok == "--out":
            skip = True
        elif not tok.startswith("--out="):
            out.append(tok)
    return out


def _write_manifest(path, argv, args, summary):
    lines = [
        f"command={args.command}",
        f"argv={json.dumps(argv)}",
        f"version={__version__}",
        f"backend={_backend.BACKEND}",
    ]
    for k in sorted(vars(args)):
        if k not in ("command", "out"):
            lines.append(f"arg.{k}={_fmt(getattr(args, k))}")
    for k in sorted(summary):
        lines.append(f"result.{k}={_fmt(summary[k])}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_manifest(path):
    """Parse ``run.manifest`` into a dict of strings."""
    entries = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line and "=" in line:
                k, v = line.split("=", 1)
                entries[k] = v
    if "argv" not in entries:
        raise DomainError(f"{path}: no argv entry")
    return entries


def _replay_argv(manifest, out):
    try:
        argv = json.loads(read_manifest(manifest)["argv"])
    except json.JSONDecodeError:
        raise DomainError(f"{manifest}: malformed argv entry") from None
    return argv + ["--out", str(out)]


def run(argv=None):
    """Execute one command line and return its exit code."""
    argv = _glue_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "replay":
            return run(_replay_argv(args.manifest, args.out))
        _validate(args)
        for name in ("nodes", "f"):
            if getattr(args, name, None) is not None:
                setattr(args, name, str(Path(getattr(args, name)).resolve()))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        seeds = _child_seeds(args.seed, 3)
        summary = _COMMANDS[args.command](args, out, seeds)
        _write_manifest(out / "run.manifest", _strip_out(_absolute_inputs(argv)), args, summary)
    except DomainError as exc:
        print(f"pwsample: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"pwsample: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IllConditionedError as exc:
        print(f"pwsample: ill-conditioned: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"pwsample: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return 0


def main():
    sys.exit(run())
