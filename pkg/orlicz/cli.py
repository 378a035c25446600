"""This module contains the ``orlicz`` command-line interface.

Every subcommand reads a :class:`~orlicz.config.RunConfig` and writes CSV artifacts to the output
directory. Each artifact starts with a single ``# seed=... command=...`` metadata line and is
written atomically.
"""
import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ._version import __version__
from .certify import ALL_CHECKS, SuiteOptions, run_suite
from .complexes import AbelianCoverSpec, cover_instance, hodge_density, sobolev_ratio, torus_cover
from .config import RunConfig
from .continuum import (
    PolynomialSymbol,
    exponent_readoff,
    laplacian_symbol,
    rn_profile,
    symbol_density,
)
from .monocalc import (
    OrliczProfile,
    asymptotic_fit,
    growth_sandwich,
    h_profile,
    heat_profiles,
    n_profile,
    nash_minorant,
    write_step_csv,
)
from .parser import load_complex
from .spectral_ops import (
    OperatorInstance,
    cayley_table_instance,
    decompose,
    random_psd_instance,
    read_dense_matrix,
    read_triplets,
    snap,
    spectral_density,
    torus_instance,
)
from .utils import csv_text, write_atomic
from .validator import ConvergenceError, NumericalError, ValidationError, Validator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def _seed_for(seed: Optional[int], index: int) -> int:
    """Derives the integer seed of the ``index``-th consumer of the master seed."""
    stream = np.random.SeedSequence(seed).spawn(index + 1)[index]
    return int(stream.generate_state(1, dtype=np.uint64)[0])


def build_instance(spec: Dict, config: RunConfig, index: int = 0) -> OperatorInstance:
    """Builds the operator instance described by one instance specification.

    Args:
        spec (dict): instance specification from the configuration
        config (RunConfig): the configuration, used to resolve paths and seeds
        index (int): position of the specification, used for default names and seeds

    Returns:
        OperatorInstance: the instance
    """
    kind = spec["kind"]
    name = spec.get("name") or f"{kind}-{index}"

    if kind == "cycle":
        return torus_instance(1, spec["size"], name=name)
    if kind == "torus":
        return torus_instance(spec["d"], spec["size"], name=name)
    if kind == "cayley-table":
        return cayley_table_instance(spec["table"], spec["generators"], name=name)
    if kind == "random":
        seed = spec.get("seed")
        seed = _seed_for(config.seed, index) if seed is None else seed
        return random_psd_instance(spec["dimension"], spec.get("rank"), seed, name=name)

    path = config.resolve(spec["path"])
    if kind == "matrix-file":
        text = path.read_text(encoding="utf-8")
        if spec.get("format", "dense") == "triplets":
            matrix = read_triplets(text, spec.get("dimension"))
        else:
            matrix = read_dense_matrix(text)
        return OperatorInstance(matrix, name=name)

    k = spec.get("k", 0)
    auto_complete = spec.get("auto_complete", False)
    if spec.get("size") is None:
        complex_ = load_complex(path, auto_complete=auto_complete)
        return OperatorInstance(complex_.hodge(k), name=name)
    cover = load_complex(path, size=spec["size"], auto_complete=auto_complete)
    return cover_instance(cover, k, name=name, jobs=config.jobs)


def _meta(config: RunConfig, command: str, **extra) -> Dict:
    return {"seed": "" if config.seed is None else config.seed, "command": command, **extra}


def cmd_spectrum(config: RunConfig, out: Path) -> int:
    """Writes the eigenvalues and the spectral decay ``F`` of every instance."""
    for index, spec in enumerate(config.instances):
        instance = build_instance(spec, config, index)
        meta = _meta(config, "spectrum", instance=instance.name)

        if instance.blocks is not None:
            eigenvalues = instance.blocks.eigenvalues(config.jobs)
            density = spectral_density(instance, jobs=config.jobs)
        else:
            decomposition = decompose(instance)
            eigenvalues = decomposition.eigenvalues
            density = spectral_density(instance, decomposition, jobs=config.jobs)

        rows = ((i, snap(float(v))) for i, v in enumerate(eigenvalues))
        write_atomic(
            out / f"{instance.name}.eigenvalues.csv", csv_text(meta, ("index", "eigenvalue"), rows)
        )
        write_atomic(out / f"{instance.name}.density.csv", write_step_csv(density, meta))
        logger.info("%s: %d eigenvalues, %d atoms", instance.name, len(eigenvalues), len(density))
    return EXIT_OK


def cmd_profiles(config: RunConfig, out: Path) -> int:
    """Writes ``F, G`` at the atoms, ``H, N`` on the y-grid, ``L̂, M̂`` on the t-grid, the
    breakpoints of the Nash minorant and the growth sandwich of every instance.

    With a configured ``profile.window`` the asymptotic fit of ``F`` is written as well.
    """
    options = config.profile
    ys = np.asarray(options["y_grid"], dtype=float)
    ts = np.asarray(options["t_grid"], dtype=float)

    for index, spec in enumerate(config.instances):
        instance = build_instance(spec, config, index)
        meta = _meta(config, "profiles", instance=instance.name)
        profile = OrliczProfile(spectral_density(instance, jobs=config.jobs))
        F, G = profile.base, profile.g

        rows = zip(F.locations.tolist(), F.cumulative.tolist(), G.cumulative.tolist())
        write_atomic(
            out / f"{instance.name}.transform.csv", csv_text(meta, ("lambda", "F", "G"), rows)
        )

        h_values = np.atleast_1d(h_profile(profile, ys))
        n_values = np.atleast_1d(n_profile(profile, ys))
        rows = zip(ys.tolist(), h_values.tolist(), n_values.tolist())
        write_atomic(out / f"{instance.name}.orlicz.csv", csv_text(meta, ("y", "H", "N"), rows))

        l_hat, m_hat = (np.atleast_1d(v) for v in heat_profiles(profile, ts))
        rows = zip(ts.tolist(), l_hat.tolist(), m_hat.tolist())
        write_atomic(out / f"{instance.name}.heat.csv", csv_text(meta, ("t", "L", "M"), rows))

        minorant = nash_minorant(F)
        write_atomic(
            out / f"{instance.name}.minorant.csv",
            csv_text(meta, ("y", "phi"), minorant.breakpoints),
        )

        sandwich = growth_sandwich(F, options["epsilon"])
        rows = ((r.check, r.param, r.lhs, r.rhs, r.margin, r.status) for r in sandwich.records)
        header = ("check", "param", "lhs", "rhs", "margin", "pass")
        write_atomic(out / f"{instance.name}.sandwich.csv", csv_text(meta, header, rows))

        if options["window"] is not None:
            try:
                fit = asymptotic_fit(F, tuple(options["window"]), options["k_candidates"])
            except ValidationError as exc:
                logger.warning("No asymptotic fit for %s: %s", instance.name, exc)
                continue
            row = [fit.alpha, fit.k, fit.c, fit.residual, fit.points]
            header = ("alpha", "k", "c", "residual", "points")
            write_atomic(out / f"{instance.name}.fit.csv", csv_text(meta, header, [row]))
    return EXIT_OK


def cmd_certify(config: RunConfig, out: Path) -> int:
    """Runs the certification suite and writes ``report.csv``; fails on any theorem-backed
    failure."""
    options = config.suite
    suite = SuiteOptions(
        states=options["states"],
        generators=tuple(options["generators"]),
        checks=tuple(options["checks"] or ALL_CHECKS),
        density_scale=options["density_scale"],
        epsilon=options["epsilon"],
        alpha=options["alpha"],
        **({"t_grid": tuple(options["t_grid"])} if options["t_grid"] else {}),
    )
    instances = [build_instance(spec, config, i) for i, spec in enumerate(config.instances)]
    report = run_suite(instances, seed=config.seed, options=suite, jobs=config.jobs)
    write_atomic(out / "report.csv", report.to_csv())

    for record in report.failures:
        logger.error(
            "FAILED %s on %s/%s: lhs=%r rhs=%r %s",
            record.check,
            record.instance,
            record.state,
            record.lhs,
            record.rhs,
            record.param,
        )
    return EXIT_OK if report.passed else EXIT_FAILED


def _tower_cover(config: RunConfig, size: int) -> AbelianCoverSpec:
    options = config.scaling
    if options["path"] is not None:
        return load_complex(config.resolve(options["path"]), size=size)
    return torus_cover(options["d"], size)


def cmd_scaling(config: RunConfig, out: Path) -> int:
    """Computes the densities, asymptotic fits and Sobolev brackets along a quotient tower and
    writes a summary with the ratios of consecutive upper bounds."""
    options = config.scaling
    k, p = options["k"], options["p"]
    header = ("N", "atoms", "mass", "alpha", "k", "c", "residual", "lower", "upper", "stability")

    rows: List[Sequence] = []
    previous_upper = None
    for index, size in enumerate(options["sizes"]):
        cover = _tower_cover(config, size)
        meta = _meta(config, "scaling", N=size, k=k)
        density = hodge_density(cover, k, jobs=config.jobs)
        write_atomic(out / f"scaling.N{size}.density.csv", write_step_csv(density, meta))

        fit_values = [math.nan] * 4
        if options["window"] is None:
            logger.info("No fit window configured; skipping the asymptotic fit at N=%d.", size)
        elif len(density):
            try:
                fit = asymptotic_fit(density, tuple(options["window"]), options["k_candidates"])
                fit_values = [fit.alpha, fit.k, fit.c, fit.residual]
            except ValidationError as exc:
                logger.warning("No asymptotic fit at N=%d: %s", size, exc)

        lower = upper = stability = math.nan
        if p is not None:
            bracket = sobolev_ratio(
                cover,
                k,
                p,
                options["samples"],
                seed=_seed_for(config.seed, index),
                jobs=config.jobs,
            )
            lower, upper = bracket.lower, bracket.upper
            if previous_upper is not None:
                stability = upper / previous_upper
            previous_upper = upper

        rows.append([size, len(density), density.total_mass, *fit_values, lower, upper, stability])

    write_atomic(out / "scaling.csv", csv_text(_meta(config, "scaling", k=k), header, rows))
    return EXIT_OK


def _symbol(options: Dict) -> PolynomialSymbol:
    if options["monomials"] is None:
        return laplacian_symbol(options["n"])
    return PolynomialSymbol(options["n"], options["monomials"], domain=options["domain"])


def cmd_continuum(config: RunConfig, out: Path) -> int:
    """Writes the closed-form ℝⁿ profiles, the Monte-Carlo density of the configured symbol and,
    if a window is configured, its exponent read-off."""
    options = config.continuum
    n = options["n"]
    meta = _meta(config, "continuum", n=n)
    lambdas = np.asarray(options["lambdas"] or np.linspace(0.0, 1.0, 21), dtype=float)

    reference = None
    if n >= 3:
        reference = rn_profile(n)
        positive = lambdas[lambdas > 0]
        rows = zip(
            positive.tolist(),
            reference.f(positive).tolist(),
            reference.g(positive).tolist(),
            reference.h(positive).tolist(),
        )
        profile_meta = {
            **meta,
            "sobolev": reference.sobolev_constant,
            "aubin": reference.aubin_constant,
        }
        write_atomic(
            out / "continuum.profile.csv",
            csv_text(profile_meta, ("lambda", "F", "G", "H_at_lambda"), rows),
        )

    symbol = _symbol(options)
    density = symbol_density(
        symbol,
        lambdas,
        budget=options["budget"],
        seed=config.seed,
        half_width=options["half_width"],
        jobs=config.jobs,
    )
    write_atomic(out / "continuum.density.csv", density.to_csv(meta))

    if reference is not None and options["monomials"] is None:
        closed = reference.f(density.lambdas)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(density.stderr > 0, (density.estimates - closed) / density.stderr, 0.0)
        rows = zip(
            density.lambdas.tolist(),
            density.estimates.tolist(),
            density.stderr.tolist(),
            closed.tolist(),
            z.tolist(),
        )
        write_atomic(
            out / "continuum.reference.csv",
            csv_text(meta, ("lambda", "estimate", "stderr", "closed_form", "z"), rows),
        )

    if options["window"] is not None:
        fit = exponent_readoff(density, tuple(options["window"]), options["k_candidates"])
        row = [fit.alpha, fit.k, fit.c, fit.residual, fit.mc_error, fit.points]
        header = ("alpha", "k", "c", "residual", "mc_error", "points")
        write_atomic(out / "continuum.fit.csv", csv_text(meta, header, [row]))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, Path], int]] = {
    "spectrum": cmd_spectrum,
    "profiles": cmd_profiles,
    "certify": cmd_certify,
    "scaling": cmd_scaling,
    "continuum": cmd_continuum,
}


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parses the command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="orlicz", description="Spectral decay, Orlicz profiles and inequality certification."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS), help="subcommand to run")
    parser.add_argument("--config", type=Path, help="path to a JSON run configuration")
    parser.add_argument("--out", type=Path, help="output directory (overrides the configuration)")
    parser.add_argument("--seed", type=int, help="master seed (overrides the configuration)")
    parser.add_argument("--jobs", type=int, help="worker cap (overrides the configuration)")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="increase verbosity (-v, -vv)"
    )
    return parser.parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``orlicz`` command."""
    args = parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        config = RunConfig.load(args.config) if args.config else RunConfig.from_dict({})
        config = config.replace(
            seed=args.seed, jobs=args.jobs, output=str(args.out) if args.out else None
        )
        if args.seed is not None or args.jobs is not None:
            Validator(config).run(raise_exception=True)
        return COMMANDS[args.command](config, Path(config.output))

    except ValidationError as exc:
        print(f"[error] {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, ConvergenceError) as exc:
        print(f"[numerical error] {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
