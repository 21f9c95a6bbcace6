# backend/app/api/cli.py
# Command-line front end: config parsing, dispatch, result files and manifest

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import dotenv_values
from pydantic import ValidationError

from app.exceptions import EXIT_NUMERICAL, ConfigValidationError, GaussWellError, ResultIOError
from app.models.critical import CriticalQuery
from app.models.deuteron import DeuteronModel
from app.models.mesh import MeshSpec
from app.models.qdot import QDotModel
from app.models.run import RunConfig, RunManifest
from app.models.well import WellSpec
from app.services.ansatz_service import optimize
from app.services.critical_service import (
    extrapolate_critical,
    find_critical,
    fit_threshold,
    has_finite_critical_depth,
    hellmann_feynman_at_threshold,
    threshold_samples,
)
from app.services.deuteron_service import (
    binding_energy_ansatz,
    binding_energy_lmm,
    binding_energy_threshold_formula,
)
from app.services.qdot_service import optimize_qdot
from app.services.reproduce_service import reproduce
from app.services.spectrum_service import radial_moments, solve_well
from app.utils import settings
from app.utils.constants import (
    CRITICAL_MESH_SIZE,
    DEUTERON_MODELS,
    Command,
    OutputFormat,
    TableId,
)
from app.utils.records import ResultStore, set_store, write_json, write_records

logger = logging.getLogger(__name__)

Records = Tuple[List[Dict[str, Any]], Optional[List[str]]]

LIST_KEYS = {"mesh_sizes", "h_grid", "window"}

SOLVE_COLUMNS = ["d", "ell", "n", "k", "v0", "energy", "mean_r", "sigma_r", "mesh_size", "h", "family"]
CRITICAL_COLUMNS = ["d", "n", "ell", "mesh_size", "h", "v0_c"]
EXTRAPOLATION_COLUMNS = [
    "d", "n", "ell", "v0_c", "beta1", "beta2", "beta3", "tau", "residual",
    "mesh_size", "significant_digits", "beta0_by_mesh", "flagged",
]
ANSATZ_COLUMNS = ["v0", "d", "ell", "level", "terms", "term", "a", "b", "s", "coefficient", "energy", "flagged"]
DEUTERON_COLUMNS = ["method", "cutoff", "terms", "v0", "energy_scale", "energy", "bound", "parameters"]
QDOT_COLUMNS = [
    "lambda", "V0", "v0", "energy", "inv_r12", "inv_r12_scaled", "alpha", "beta", "gamma", "c",
    "delta1", "delta2", "a", "b", "s", "flagged",
]


def _handle_solve(config: RunConfig) -> Records:
    well = WellSpec(v0=config.v0, d=config.dim, ell=config.ell)
    spectrum = solve_well(well, MeshSpec(size=config.nmesh, h=config.h))
    records = []
    for state in spectrum.states:
        if config.n is not None and state.n != config.n:
            continue
        mean_r, sigma_r = radial_moments(state)
        records.append(
            {
                "d": well.d,
                "ell": state.ell,
                "n": state.n,
                "k": state.k,
                "v0": well.v0,
                "energy": state.energy,
                "mean_r": mean_r,
                "sigma_r": sigma_r,
                "mesh_size": spectrum.mesh_spec.size,
                "h": spectrum.mesh_spec.h,
                "family": spectrum.mesh_spec.family,
            }
        )
    return records, SOLVE_COLUMNS


def _critical_query(config: RunConfig) -> CriticalQuery:
    options: Dict[str, Any] = {"d": config.dim, "n": config.n, "ell": config.ell}
    if config.mesh_sizes:
        options["mesh_sizes"] = tuple(config.mesh_sizes)
    if config.h_grid:
        options["h_grid"] = tuple(config.h_grid)
    return CriticalQuery(**options)


def _extrapolation_record(query: CriticalQuery) -> Dict[str, Any]:
    fit = extrapolate_critical(query)
    return {
        "d": query.d,
        "n": query.n,
        "ell": query.ell,
        "v0_c": fit.v0_critical,
        "beta1": fit.beta[1],
        "beta2": fit.beta[2],
        "beta3": fit.beta[3],
        "tau": fit.tau,
        "residual": fit.residual,
        "mesh_size": fit.mesh_size,
        "significant_digits": fit.significant_digits,
        "beta0_by_mesh": fit.beta0_by_mesh,
        "flagged": fit.flagged,
    }


def _handle_critical(config: RunConfig) -> Records:
    query = _critical_query(config)
    if config.extrapolate:
        return [_extrapolation_record(query)], EXTRAPOLATION_COLUMNS
    v0_c = find_critical(query, config.nmesh, config.h)
    record = {"d": query.d, "n": query.n, "ell": query.ell, "mesh_size": config.nmesh, "h": config.h, "v0_c": v0_c}
    return [record], CRITICAL_COLUMNS


def _handle_threshold_fit(config: RunConfig) -> Records:
    query = _critical_query(config)
    v0_c = config.v0_c
    if v0_c is None:
        if not has_finite_critical_depth(query.d, query.ell, query.k):
            v0_c = 0.0
        elif query.ell == 0:
            v0_c = extrapolate_critical(query).v0_critical
        else:
            v0_c = find_critical(query, CRITICAL_MESH_SIZE, 1.0)
    window = tuple(config.window) if config.window else None
    samples = threshold_samples(query.d, query.ell, query.n, v0_c, window, config.samples)
    fit = fit_threshold(query.d, query.ell, v0_c, samples)
    record: Dict[str, Any] = {
        "d": query.d,
        "n": query.n,
        "ell": query.ell,
        "kind": fit.kind,
        "v0_c": v0_c,
        "window_low": fit.window[0],
        "window_high": fit.window[1],
        "samples": len(samples),
    }
    record.update(fit.values)
    record["residual"] = fit.residual
    if fit.alternate_residual is not None:
        record["alternate_residual"] = fit.alternate_residual
    if query.d == 3 and query.ell > 0:
        record["hellmann_feynman"] = hellmann_feynman_at_threshold(query.d, query.ell, query.n, v0_c)
    return [record], None


def _handle_ansatz(config: RunConfig) -> Records:
    well = WellSpec(v0=config.v0, d=config.dim, ell=config.ell)
    state = optimize(
        well, terms=config.terms, restarts=config.restarts, seed=config.seed, level=config.level
    )
    records = []
    for index, (conf, coefficient) in enumerate(zip(state.configs, state.linear_coeffs), start=1):
        records.append(
            {
                "v0": well.v0,
                "d": well.d,
                "ell": well.ell,
                "level": state.level,
                "terms": state.terms,
                "term": index,
                "a": conf.a,
                "b": conf.b,
                "s": conf.s,
                "coefficient": coefficient,
                "energy": state.energy,
                "flagged": state.flagged,
            }
        )
    return records, ANSATZ_COLUMNS


def _deuteron_model(config: RunConfig) -> DeuteronModel:
    c1, c2 = config.c1, config.c2
    if c1 is None or c2 is None:
        defaults = DEUTERON_MODELS.get(config.cutoff)
        if defaults is None:
            raise ConfigValidationError(
                f"no default couplings for Lambda={config.cutoff}; pass c1 and c2", field="cutoff"
            )
        c1 = defaults["c1"] if c1 is None else c1
        c2 = defaults["c2"] if c2 is None else c2
    return DeuteronModel(cutoff=config.cutoff, c1=c1, c2=c2, channel=config.channel)


def _deuteron_record(result) -> Dict[str, Any]:
    return {
        "method": result.method,
        "cutoff": result.cutoff,
        "terms": result.terms,
        "v0": result.v0,
        "energy_scale": result.energy_scale,
        "energy": result.energy,
        "bound": result.bound,
        "parameters": result.parameters,
    }


def _handle_deuteron(config: RunConfig) -> Records:
    model = _deuteron_model(config)
    lmm = binding_energy_lmm(model, MeshSpec(size=max(config.nmesh, 1000), h=config.h))
    records = [_deuteron_record(lmm)]
    if lmm.bound:
        for terms in range(1, config.terms + 1):
            records.append(
                _deuteron_record(
                    binding_energy_ansatz(model, terms=terms, restarts=config.restarts, seed=config.seed)
                )
            )
        records.append(_deuteron_record(binding_energy_threshold_formula(model)))
    return records, DEUTERON_COLUMNS


def _handle_qdot(config: RunConfig) -> Records:
    model = QDotModel(width=config.width, depth=config.depth)
    result = optimize_qdot(model, restarts=config.restarts, seed=config.seed, symmetric=config.symmetric)
    trial = result.trial
    record = {
        "lambda": model.width,
        "V0": model.depth,
        "v0": model.v0,
        "energy": result.energy,
        "inv_r12": result.inv_r12,
        "inv_r12_scaled": result.inv_r12_scaled,
        "alpha": trial.alpha,
        "beta": trial.beta,
        "gamma": trial.gamma,
        "c": trial.c,
        "delta1": trial.delta1,
        "delta2": trial.delta2,
        "a": trial.chi0.a,
        "b": trial.chi0.b,
        "s": trial.chi0.s,
        "flagged": result.flagged,
    }
    return [record], QDOT_COLUMNS


HANDLERS: Dict[Command, Callable[[RunConfig], Records]] = {
    Command.SOLVE: _handle_solve,
    Command.CRITICAL: _handle_critical,
    Command.THRESHOLD_FIT: _handle_threshold_fit,
    Command.ANSATZ: _handle_ansatz,
    Command.DEUTERON: _handle_deuteron,
    Command.QDOT: _handle_qdot,
}


def _emit_error(error: GaussWellError) -> int:
    sys.stderr.write(json.dumps(error.to_record(), sort_keys=True) + "\n")
    return error.exit_status


def run(config: RunConfig) -> int:
    """Dispatch one validated config; writes result records plus manifest.json."""
    settings.configure_workers(config.workers)
    store_path = config.store or settings.RESULT_STORE
    if store_path:
        set_store(ResultStore(store_path))

    manifest = RunManifest(command=config.command, config=config.model_dump(mode="json"))
    extension = config.format.value
    try:
        started = time.perf_counter()
        passed = True
        if config.command == Command.REPRODUCE:
            report = reproduce(config.table)
            records, columns = report.rows, report.columns
            passed = report.passed
            name = config.table.value
        else:
            records, columns = HANDLERS[config.command](config)
            name = config.command.value.replace("-", "_")
        manifest.timings["compute"] = round(time.perf_counter() - started, 6)

        started = time.perf_counter()
        path = os.path.join(config.output_dir, f"{name}.{extension}")
        manifest.outputs[os.path.basename(path)] = write_records(records, path, config.format, columns)
        manifest.timings["write"] = round(time.perf_counter() - started, 6)
        manifest.status = "ok" if passed else "failed"
        write_json(manifest.model_dump(mode="json"), os.path.join(config.output_dir, "manifest.json"))
    except ValidationError as e:
        logger.error(f"Invalid model parameters: {str(e)}")
        return _emit_error(ConfigValidationError(str(e)))
    except GaussWellError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        return _emit_error(e)
    except OSError as e:
        logger.error(f"I/O failure: {str(e)}")
        return _emit_error(ResultIOError(config.output_dir, str(e)))

    logger.info(f"{config.command.value} finished: {manifest.outputs}")
    if not passed:
        logger.warning(f"Reproduction of {config.table.value} failed at least one tolerance")
        return EXIT_NUMERICAL
    return 0


def _split_list(key: str, value: str) -> Any:
    parts = [part.strip() for part in value.split(",") if part.strip()]
    if key == "mesh_sizes":
        return [int(part) for part in parts]
    return [float(part) for part in parts]


def load_config_file(path: str) -> Dict[str, Any]:
    """KEY=VALUE file (dotenv syntax); keys are case-insensitive, lists are comma-separated."""
    if not os.path.exists(path):
        raise ConfigValidationError(f"config file '{path}' does not exist", field="config")
    values: Dict[str, Any] = {}
    for key, value in dotenv_values(path).items():
        key = key.strip().lower().replace("-", "_")
        if value is None:
            continue
        if key in LIST_KEYS:
            try:
                values[key] = _split_list(key, value)
            except ValueError:
                raise ConfigValidationError(f"cannot parse list '{value}'", field=key)
        else:
            values[key] = value
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausswell",
        description="Bound states, critical depths and variational energies of Gaussian wells",
    )
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="KEY=VALUE config file; flags override its values")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])
    common.add_argument("--output", dest="output_dir", help="Directory for result files")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--store", help="JSONL result store for resumable sweeps")
    common.add_argument("--nmesh", type=int, help="Mesh size N")
    common.add_argument("--h", type=float, help="Mesh scaling h")
    common.add_argument("--dim", type=int, help="Spatial dimension d")
    common.add_argument("--ell", type=int, help="Angular momentum")
    common.add_argument("--n", type=int, help="Principal label of the state")
    common.add_argument("--v0", type=float, help="Dimensionless depth")

    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser(Command.SOLVE.value, parents=[common], help="Bound states on a mesh")

    critical = subparsers.add_parser(Command.CRITICAL.value, parents=[common], help="Critical depth")
    critical.add_argument("--extrapolate", action="store_true", default=argparse.SUPPRESS)
    critical.add_argument("--mesh-sizes", dest="mesh_sizes", type=lambda v: _split_list("mesh_sizes", v))
    critical.add_argument("--h-grid", dest="h_grid", type=lambda v: _split_list("h_grid", v))

    threshold = subparsers.add_parser(
        Command.THRESHOLD_FIT.value, parents=[common], help="Near-threshold expansion"
    )
    threshold.add_argument("--v0-c", dest="v0_c", type=float)
    threshold.add_argument("--window", type=lambda v: _split_list("window", v))
    threshold.add_argument("--samples", type=int)
    threshold.add_argument("--mesh-sizes", dest="mesh_sizes", type=lambda v: _split_list("mesh_sizes", v))

    ansatz = subparsers.add_parser(Command.ANSATZ.value, parents=[common], help="Variational Ansatz")
    ansatz.add_argument("--terms", type=int)
    ansatz.add_argument("--restarts", type=int)
    ansatz.add_argument("--level", type=int)

    deuteron = subparsers.add_parser(Command.DEUTERON.value, parents=[common], help="Deuteron energy")
    deuteron.add_argument("--cutoff", type=float, help="Lambda in fm^-1")
    deuteron.add_argument("--c1", type=float)
    deuteron.add_argument("--c2", type=float)
    deuteron.add_argument("--channel", choices=["triplet", "singlet"])
    deuteron.add_argument("--terms", type=int)
    deuteron.add_argument("--restarts", type=int)

    qdot = subparsers.add_parser(Command.QDOT.value, parents=[common], help="Two-electron dot")
    qdot.add_argument("--width", type=float, help="lambda")
    qdot.add_argument("--depth", type=float, help="V0")
    qdot.add_argument("--restarts", type=int)
    qdot.add_argument("--symmetric", action="store_true", default=argparse.SUPPRESS)

    reproduce_parser = subparsers.add_parser(
        Command.REPRODUCE.value, parents=[common], help="Reproduce a reference table"
    )
    reproduce_parser.add_argument("table", choices=[t.value for t in TableId])
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Merge config file and flags, then validate before any compute."""
    namespace = vars(build_parser().parse_args(argv))
    values: Dict[str, Any] = {}
    config_path = namespace.pop("config", None)
    if config_path:
        values.update(load_config_file(config_path))
    values.update({key: value for key, value in namespace.items() if value is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigValidationError(str(e))


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigValidationError as e:
        logger.error(f"Invalid configuration: {e.detail}")
        return _emit_error(e)
    logger.info(f"Running {config.command.value}")
    return run(config)
