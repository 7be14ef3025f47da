"""Command line entry point: ``spindeco <subcommand> [options]``.

Every subcommand writes plain CSV files (one header line) with JSON sidecars
into ``--out`` and prints a JSON run manifest on stdout.
"""
import argparse
import json
import math
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coupling import CouplingSpec, SpecError, appendix_families, derive, y_scaling
from .evolution import diffusion_profile_quantum, frames, gaussian_matched, magnetization
from .external import diffusion_coefficient, m_external
from .io import manifest_hash, write_csv, write_json
from .kernel import m_kernel, phi, phi_asymptotic, psi
from .montecarlo import validate
from .states import SpinState, cat2, cat3, coherent, random_state
from .wigner import gauss_grid, stereographic_grid

__all__ = ["main", "run"]


class _Run:
    """Collects outputs and builds the manifest for one invocation."""

    def __init__(self, command, args):
        self.command = command
        self.inputs = {k: v for k, v in sorted(vars(args).items())
                       if k not in ("func", "command") and v is not None}
        if getattr(args, "spec", None):
            self.inputs["spec_contents"] = json.loads(Path(args.spec).read_text())
        self.out = Path(getattr(args, "out", None) or ".")
        self.files = []
        self.result = None
        self.hash = manifest_hash({"command": command, "inputs": self.inputs,
                                   "version": __version__})

    def csv(self, name, header, rows, extra=None):
        path = self.out / name
        write_csv(path, header, rows)
        side = {"command": self.command, "columns": header, "manifest_hash": self.hash}
        if extra:
            side.update(extra)
        write_json(path.with_suffix(".json"), side)
        self.files.append(str(path))
        return path

    def manifest(self):
        data = {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.inputs.get("seed"),
            "versions": {"spindeco": __version__, "numpy": np.__version__,
                         "python": platform.python_version()},
            "outputs": self.files,
            "manifest_hash": self.hash,
        }
        if self.result is not None:
            data["result"] = self.result
        return data


def _load_spec(path, N=None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError("spec", f"cannot read {path}: {exc.strerror}") from None
    spec = CouplingSpec.from_json(text)
    if N is not None:
        spec = CouplingSpec(spec.two_j, spec.delta_bar, N)
    return spec


def _times(text):
    """``"0,1,2"`` or ``"start:stop:count"``."""
    if ":" in text:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    return np.array([float(x) for x in text.split(",") if x.strip()])


def _state(text, two_j, seed):
    kind, _, rest = text.partition(":")
    nums = [float(x) for x in rest.split(",") if x.strip()]
    if kind == "coherent":
        return coherent(two_j, *(nums or [0.0, 0.0]))
    if kind == "cat2":
        nums = nums or [math.pi / 2, 0.0, math.pi / 2, math.pi]
        return cat2(two_j, tuple(nums[0:2]), tuple(nums[2:4]))
    if kind == "cat3":
        nums = nums or [math.pi / 2, 0.0, math.pi / 2, 2.0, math.pi / 2, math.pi]
        return cat3(two_j, tuple(nums[0:2]), tuple(nums[2:4]), tuple(nums[4:6]))
    if kind == "random":
        return random_state(two_j, seed)
    path = Path(text)
    if path.exists():
        st = SpinState.from_json(path.read_text())
        if st.two_j != two_j:
            raise SpecError("state", "two_j differs from the coupling spec")
        return st
    raise SpecError("state", f"unknown state {text!r}")


def _grid(text):
    kind, _, rest = text.partition(":")
    if kind.isdigit():
        return stereographic_grid(int(kind))
    parts = rest.split(",") if rest else []
    if kind == "plane":
        res = int(parts[0]) if parts else 81
        r_max = float(parts[1]) if len(parts) > 1 else 4.0
        radial = parts[2] if len(parts) > 2 else "tan"
        return stereographic_grid(res, r_max, radial)
    if kind == "gauss":
        n = int(parts[0]) if parts else 32
        return gauss_grid(n)
    raise SpecError("grid", f"unknown grid {text!r}")


def _zl_rows(spec):
    d = derive(spec)
    l = np.arange(spec.two_j + 1)
    return np.column_stack([l, d.z, y_scaling(spec, l / max(spec.two_j, 1)), d.hat_delta])


def cmd_zl(args, run):
    spec = _load_spec(args.spec)
    run.csv("zl.csv", ["l", "Z", "Y", "delta_hat"], _zl_rows(spec))


def cmd_timescales(args, run):
    d = derive(_load_spec(args.spec))
    ts = d.timescales
    result = {**ts.as_dict(), "z_av": d.z_av, "d0": d.d0,
              "in_tau0": ts.in_tau0().as_dict()}
    run.result = result
    path = run.out / "timescales.json"
    write_json(path, {**result, "manifest_hash": run.hash})
    run.files.append(str(path))


def cmd_kernel(args, run):
    t = np.linspace(0, args.tmax, args.nt)
    if args.surface:
        zs = np.linspace(-0.95, 0.95, args.nz)
        rows = [(ti, z, m_kernel(ti, z, args.method)) for z in zs for ti in t]
        run.csv("kernel_surface.csv", ["t", "z", "M"], rows)
    else:
        if args.z is None:
            raise SpecError("z", "required unless --surface is given")
        rows = [(ti, m_kernel(ti, args.z, args.method)) for ti in t]
        run.csv("kernel.csv", ["t", "M"], rows, {"z": args.z})


def cmd_psi(args, run):
    t = np.linspace(0, args.tmax, args.nt)
    run.csv("psi.csv", ["tp", "psi"], np.column_stack([t, psi(t)]))


def cmd_phi(args, run):
    t = np.linspace(0, args.tmax, args.nt)
    rows = [(ti, phi(ti), phi_asymptotic(ti) if ti > 0 else 1.0) for ti in t]
    run.csv("phi.csv", ["t", "phi", "asymptote"], rows)


def cmd_evolve(args, run):
    spec = _load_spec(args.spec)
    state = _state(args.state, spec.two_j, args.seed)
    grid = _grid(args.grid)
    times = _times(args.times)
    out = frames(state.harmonics(), derive(spec), times, grid, args.kind,
                 out_dir=run.out, absolute_time=args.absolute_time)
    write_json(run.out / "state.json", json.loads(state.to_json()))
    run.files += [str(run.out / f"frame_{i:04d}.csv") for i in range(len(out))]
    run.files.append(str(run.out / "manifest.json"))


def cmd_diffusion_profile(args, run):
    r = np.linspace(0, args.rmax, args.nr)
    rows = np.column_stack([r, diffusion_profile_quantum(r, args.tp),
                            gaussian_matched(r / math.sqrt(args.tp)) / args.tp])
    run.csv("diffusion_profile.csv", ["r", "quantum", "gaussian"], rows, {"tp": args.tp})


def cmd_magnetization(args, run):
    spec = _load_spec(args.spec)
    d = derive(spec)
    state = _state(args.state, spec.two_j, args.seed)
    t = np.linspace(0, args.tmax, args.nt)
    sz = magnetization(state.density_matrix(), d, t, args.absolute_time)
    run.csv("magnetization.csv", ["t", "Sz"], np.column_stack([t, sz]))


def cmd_external(args, run):
    t = np.linspace(0, args.tmax, args.nt)
    rows = [(ti, m_external(ti, args.E, args.zl, args.zav)) for ti in t]
    run.csv("external.csv", ["t", "M"], rows, {"E": args.E, "zav": args.zav, "zl": args.zl})


def cmd_diffusion(args, run):
    spec = _load_spec(args.spec)
    ts = derive(spec).timescales
    result = {"D": float(diffusion_coefficient(spec, args.E)),
              "tau0": ts.tau0, "tau1": ts.tau1, "tau2": ts.tau2}
    run.result = result
    path = run.out / "diffusion.json"
    write_json(path, {**result, "E": args.E, "manifest_hash": run.hash})
    run.files.append(str(path))


def cmd_mc_validate(args, run):
    spec = _load_spec(args.spec, args.N)
    times = _times(args.times)
    estimates = validate(spec, args.N, args.samples, args.seed, times)
    report = [{"l": e.l, "m": e.m, "t": e.times.tolist(),
               "empirical": e.empirical.tolist(), "planar": e.planar.tolist(),
               "sigma": e.sigma.tolist(), "pass": e.passes()} for e in estimates]
    run.result = report
    path = run.out / "mc_validate.json"
    write_json(path, {"report": report, "manifest_hash": run.hash})
    run.files.append(str(path))


def cmd_figures(args, run):
    if args.id == "appendix-A":
        for name, spec in appendix_families(args.two_j, args.l0).items():
            run.csv(f"appendix_a_{name}.csv", ["l", "Z", "Y", "delta_hat"], _zl_rows(spec),
                    {"family": name, "spec": json.loads(spec.to_json())})
    elif args.id == "kernel-surface":
        args.surface, args.nz, args.method = True, 39, "auto"
        args.tmax, args.nt = 8.0, 161
        cmd_kernel(args, run)
    elif args.id == "psi-collapse":
        tp = np.linspace(0, 5, 101)
        for z in (0.9, 0.99, 0.995):
            rows = [(x, m_kernel(x / (1 - z), z, "quadrature"), psi(x)) for x in tp]
            run.csv(f"psi_collapse_z{z}.csv", ["tp", "M", "psi"], rows, {"z": z})
    else:
        raise SpecError("id", f"unknown figure id {args.id!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="spindeco", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", default="out", help="output directory")
        sp.set_defaults(func=func)
        return sp

    sp = add("zl", cmd_zl, "Z(l) and its large-j scaling form")
    sp.add_argument("--spec", required=True)

    sp = add("timescales", cmd_timescales, "tau0..tau3, Z_av and D0")
    sp.add_argument("--spec", required=True)

    sp = add("kernel", cmd_kernel, "planar kernel M(t, z)")
    sp.add_argument("--z", type=float)
    sp.add_argument("--tmax", type=float, default=10.0)
    sp.add_argument("--nt", type=int, default=201)
    sp.add_argument("--nz", type=int, default=39)
    sp.add_argument("--surface", action="store_true")
    sp.add_argument("--method", default="auto",
                    choices=["auto", "series", "quadrature", "bessel", "psi", "asymptotic"])

    sp = add("psi", cmd_psi, "scaling function Psi(t')")
    sp.add_argument("--tmax", type=float, default=5.0)
    sp.add_argument("--nt", type=int, default=201)

    sp = add("phi", cmd_phi, "first-order correction Phi(t)")
    sp.add_argument("--tmax", type=float, default=20.0)
    sp.add_argument("--nt", type=int, default=201)

    sp = add("evolve", cmd_evolve, "phase-space frames of an evolving state")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--state", default="coherent",
                    help="coherent[:th,ph] | cat2[:...] | cat3[:...] | random | state.json")
    sp.add_argument("--times", default="0:5:11", help="list a,b,c or start:stop:count")
    sp.add_argument("--grid", default="plane:81", help="N | plane:res[,rmax[,tan|arctan]] | gauss:n")
    sp.add_argument("--kind", default="husimi", choices=["husimi", "wigner", "p"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--absolute-time", action="store_true")

    sp = add("diffusion-profile", cmd_diffusion_profile, "quantum vs Gaussian planar profile")
    sp.add_argument("--tp", type=float, default=1.0)
    sp.add_argument("--rmax", type=float, default=4.0)
    sp.add_argument("--nr", type=int, default=201)

    sp = add("magnetization", cmd_magnetization, "<S_z>(t)")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--state", default="coherent:0,0")
    sp.add_argument("--tmax", type=float, default=10.0)
    sp.add_argument("--nt", type=int, default=201)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--absolute-time", action="store_true")

    sp = add("external", cmd_external, "kernel with bath dynamics")
    sp.add_argument("--E", type=float, default=0.0)
    sp.add_argument("--zav", type=float, required=True)
    sp.add_argument("--zl", type=float, required=True)
    sp.add_argument("--tmax", type=float, default=10.0)
    sp.add_argument("--nt", type=int, default=201)

    sp = add("diffusion", cmd_diffusion, "fast-bath diffusion constant")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--E", type=float, default=0.0)

    sp = add("mc-validate", cmd_mc_validate, "random-matrix check of the kernel")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--N", type=int, default=128)
    sp.add_argument("--samples", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--times", default="0:5:11")

    sp = add("figures", cmd_figures, "datasets behind the figure families")
    sp.add_argument("--id", required=True)
    sp.add_argument("--two-j", dest="two_j", type=int, default=80)
    sp.add_argument("--l0", type=int, default=3)
    return p


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)          # exits with 2 on bad flags
    try:
        state = _Run(args.command, args)
        args.func(args, state)
    except SpecError as exc:
        print(f"spindeco {args.command}: invalid input: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"spindeco {args.command}: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(state.manifest(), sort_keys=True, indent=2))
    return 0


def main():
    sys.exit(run())
