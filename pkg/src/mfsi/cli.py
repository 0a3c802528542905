"""Command-line entry point.

Subcommands: synthesize, pulse, strip, hull, trajectory, timesignal,
selftest.  Exit codes: 0 success, 2 config error, 3 numerical failure,
4 I/O error.
"""

import argparse
import sys

import numpy as np

from . import outputs, pipeline
from .errors import ConfigError, ConvergenceError, MfsiError, NoSupportError
from .operators import NoiseSpec
from .scenario import load_scenario_file

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_RUNNERS = {
    "synthesize": pipeline.run_synthesize,
    "pulse": pipeline.run_pulse,
    "strip": pipeline.run_strip,
    "hull": pipeline.run_hull,
    "trajectory": pipeline.run_trajectory,
    "timesignal": pipeline.run_timesignal,
}


def build_parser():
    p = argparse.ArgumentParser(prog="mfsi",
                                description="Multi-frequency far-field imaging of "
                                            "pulsed moving sources")
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--out", help="output directory (default: scenario outputs.path)")
    p.add_argument("--seed", type=int, help="override the scenario noise seed")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--verify", action="store_true",
                   help="re-run and compare output hashes against the manifest")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        sp = sub.add_parser(name)
        if name == "strip":
            sp.add_argument("--eta", help="comma-separated strip shifts")
    sub.add_parser("selftest")
    return p


def _selftest():
    """Quick numerical self-checks; prints one line per check."""
    from . import forward, geometry, imaging, operators, spectral

    checks = []
    rng = np.random.default_rng(11)
    m = rng.standard_normal((24, 24)) + 1j * rng.standard_normal((24, 24))
    a = m + m.conj().T
    eig = spectral.hermitian_eigen(a)
    rec = (eig.vectors * eig.values) @ eig.vectors.conj().T
    checks.append(("eigen reconstruction",
                   np.linalg.norm(rec - a) <= 1e-10 * np.linalg.norm(a)))
    gram = eig.vectors.conj().T @ eig.vectors
    checks.append(("eigenvector unitarity",
                   np.abs(gram - np.eye(24)).max() <= 1e-10))

    scene = forward.SourceScene(geometry.Ball(1.0), forward.Polynomial2D(),
                                geometry.FixedPoint((0.0, 0.0)), [2.0])
    grid = forward.FrequencyGrid(0.0, 3 * np.pi, 16)
    band = forward.far_field_band(scene, 0, [1.0, 0.0], grid, 64)
    checks.append(("band conjugate symmetry",
                   np.abs(band.minus_samples
                          - np.conj(band.plus_samples[:-1])).max() <= 1e-12))
    mat = operators.assemble_toeplitz(band)
    diffs = [np.ptp(np.diagonal(mat.entries, k)) for k in range(-15, 16)]
    checks.append(("toeplitz structure", max(np.abs(diffs)) == 0.0))
    spec = NoiseSpec(0.05, seed=42)
    n1 = operators.add_noise(mat, spec)
    n2 = operators.add_noise(mat, spec)
    checks.append(("noise determinism", np.array_equal(n1, n2)))
    sharp = spectral.sharpen(mat)
    phi = imaging.test_vector((0.0, 0.0), 2.0, [1.0, 0.0], 1.0, grid)
    ident = spectral.SharpOperator(np.eye(16), spectral.hermitian_eigen(np.eye(16)),
                                   phi.direction, grid)
    checks.append(("unit-operator series", abs(imaging.picard_indicator(ident, phi) - 16.0) <= 1e-12))
    checks.append(("positive operator", sharp.eig.values.min() >= 0.0))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= bool(passed)
    return EXIT_OK if ok else EXIT_NUMERICAL


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        return _selftest()

    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        scenario = load_scenario_file(args.config)
        if args.seed is not None and scenario.noise is not None:
            scenario.noise = NoiseSpec(scenario.noise.level, seed=args.seed,
                                       distribution=scenario.noise.distribution)
        out_dir = args.out or scenario.out_path

        previous = None
        if args.verify:
            try:
                previous = outputs.load_manifest(out_dir)
            except OSError:
                print("error: --verify needs an existing manifest", file=sys.stderr)
                return EXIT_CONFIG

        kwargs = {"jobs": max(args.jobs, 1)}
        if args.command == "strip" and getattr(args, "eta", None):
            kwargs["etas"] = [float(v) for v in args.eta.split(",")]
        manifest = _RUNNERS[args.command](scenario, out_dir, **kwargs)

        if previous is not None:
            old = {o["path"]: o["sha256"] for o in previous["outputs"]}
            new = {o["path"]: o["sha256"] for o in manifest["outputs"]}
            if old != new:
                changed = sorted(set(old) ^ set(new)
                                 | {p for p in old.keys() & new.keys() if old[p] != new[p]})
                print("verification FAILED for: " + ", ".join(changed), file=sys.stderr)
                return EXIT_NUMERICAL
            print(f"verified {len(new)} outputs against the manifest")
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, NoSupportError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MfsiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
