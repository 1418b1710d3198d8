"""
``cobsi-kit`` command line.

    cobsi-kit generate --config exp.cfg --out runs/a
    cobsi-kit decimate --config exp.cfg --out runs/a
    cobsi-kit run      --config exp.cfg --out runs/a --set method=sbi
    cobsi-kit evaluate --config exp.cfg --out runs/a
    cobsi-kit render   --config exp.cfg --out runs/a --set render.mode=fk

Exit status: 0 on success, 2 for configuration or input errors, 3 when a
solver produced non-finite numbers.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .. import io
from ..baselines import dmssa, mssa, sbi_admm
from ..errors import CobsiError, ConfigError, NumericalError
from ..model import fit, interpolate
from ..survey import SamplingMask, apply_forward
from ..synthgen import WaveletSpec, format_events, read_events, synthesize
from .config import ExperimentConfig, load_config
from .recipes import get_recipe
from .render import render, write_pgm
from .report import evaluate

log = logging.getLogger("cobsi")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _thread_limit():
    raw = os.environ.get("COBSI_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"COBSI_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("COBSI_THREADS must be >= 0")
    if n == 0:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=n)


def _read_geometry(cfg: ExperimentConfig):
    return io.read_geometry(cfg.path(cfg.geometry, "geometry.csv"))


def cmd_generate(cfg: ExperimentConfig) -> List[Path]:
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    if cfg.events:
        events = read_events(cfg.path(cfg.events, "events.csv").read_text().splitlines())
        if not cfg.geometry:
            raise ConfigError("an event file needs a geometry file ('geometry = ...')")
        geometry = _read_geometry(cfg)
        wavelet = WaveletSpec()
        offset = 0.0
    elif cfg.recipe:
        recipe = get_recipe(cfg.recipe)
        events = list(recipe.events)
        geometry = recipe.geometry(cfg.seed)
        wavelet = recipe.wavelet
        offset = recipe.source_line_offset
    else:
        raise ConfigError("generate needs either 'recipe' or 'events'")
    if cfg.wavelet_freq is not None:
        wavelet = WaveletSpec(cfg.wavelet_freq, wavelet.support_halfwidth)
    if cfg.source_line_offset is not None:
        offset = cfg.source_line_offset
    cube = synthesize(geometry, events, wavelet, offset, cfg.noise_sigma, cfg.seed)
    paths = [out / "truth.cbsi", out / "geometry.csv", out / "events.csv"]
    io.write_cube(paths[0], cube)
    io.write_geometry(paths[1], geometry)
    paths[2].write_text(format_events(events))
    log.info("generated %s cube %s", cfg.experiment_name, cube.shape)
    return paths


def cmd_decimate(cfg: ExperimentConfig) -> List[Path]:
    cube = io.read_cube(cfg.path(cfg.cube or cfg.truth, "truth.cbsi"))
    missing = cfg.missing
    if missing is None:
        if not cfg.recipe:
            raise ConfigError("decimate needs 'decimate.missing' or a recipe")
        missing = get_recipe(cfg.recipe).missing
    try:
        mask = SamplingMask(cube.k, tuple(missing))
    except ValueError as exc:
        raise ConfigError(f"invalid shot selection: {exc}") from exc
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "observed.cbsi", out / "mask.txt"]
    io.write_cube(paths[0], apply_forward(cube, mask))
    io.write_mask(paths[1], mask)
    log.info("removed shots %s; %d of %d remain", list(mask.missing), cube.k - mask.s, cube.k)
    return paths


def cmd_run(cfg: ExperimentConfig) -> List[Path]:
    geometry = _read_geometry(cfg)
    observed = io.read_cube(cfg.path(cfg.observed, "observed.cbsi"))
    mask = io.read_mask(cfg.path(cfg.mask, "mask.txt"), geometry.shape[2])
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    method = cfg.method
    paths = [out / f"{method}.cbsi"]
    if method == "cobsi":
        width, hidden = cfg.network()
        model, history = fit(
            observed, geometry, mask, cfg.encoding(), cfg.train_config(),
            width=width, hidden_layers=hidden,
        )
        result = interpolate(model, geometry, mask, observed)
        paths += [out / "cobsi.cbsm", out / "cobsi_loss.csv"]
        io.write_model(paths[1], model)
        paths[2].write_text(
            "epoch,loss\n" + "".join(f"{i + 1},{v!r}\n" for i, v in enumerate(history.tolist()))
        )
        log.info("cobsi final loss %.3e after %d epochs", history[-1], history.size)
    elif method == "sbi":
        res = sbi_admm(observed, geometry, mask, cfg.sbi_config())
        if not res.converged:
            log.warning("SBI stopped after %d iterations without meeting tolerances", res.iterations)
        result = res.cube
    elif method == "mssa":
        result = mssa(observed, geometry, mask, cfg.mssa_config("mssa"))
    else:
        result = dmssa(observed, geometry, mask, cfg.mssa_config("dmssa"))
    if not np.all(np.isfinite(result.data)):
        raise NumericalError(f"{method} produced non-finite amplitudes")
    io.write_cube(paths[0], result)
    return paths


def cmd_evaluate(cfg: ExperimentConfig) -> List[Path]:
    truth = io.read_cube(cfg.path(cfg.truth or cfg.cube, "truth.cbsi"))
    mask = io.read_mask(cfg.path(cfg.mask, "mask.txt"), truth.k)
    estimates = {}
    for method in cfg.eval_methods:
        p = cfg.out_dir / f"{method}.cbsi"
        if p.exists():
            estimates[method] = io.read_cube(p)
    if not estimates:
        raise ConfigError(f"no interpolated cubes for {list(cfg.eval_methods)} in {cfg.out_dir}")
    report = evaluate(truth, estimates, mask, cfg.experiment_name)
    path = cfg.out_dir / "report.csv"
    path.write_text(report.to_csv())
    for method, (p, s) in report.averages().items():
        log.info("%-6s PSNR %7.3f dB  SSIM %.3f", method, p, s)
    return [path]


def cmd_render(cfg: ExperimentConfig) -> List[Path]:
    source = cfg.path(cfg.render_input, f"{cfg.method}.cbsi")
    cube = io.read_cube(source)
    shot = cfg.render_shot
    if shot is None:
        mask_path = cfg.path(cfg.mask, "mask.txt")
        missing = io.read_mask(mask_path, cube.k).missing if mask_path.exists() else ()
        shot = missing[0] if missing else 0
    if not 0 <= shot < cube.k:
        raise ConfigError(f"render.shot {shot} outside [0, {cube.k})")
    truth = None
    if cfg.render_mode == "error":
        truth = io.read_cube(cfg.path(cfg.truth, "truth.cbsi")).shot(shot)
    dt, dg = 1.0, 1.0
    if cfg.render_mode == "fk":
        geometry = _read_geometry(cfg)
        dt = geometry.dt
        dg = float(np.mean(np.diff(geometry.receiver_axis)))
    gray = render(cube.shot(shot), cfg.render_mode, truth=truth, dt=dt, dg=dg)
    out = cfg.path(cfg.render_output, f"{source.stem}_{cfg.render_mode}_shot{shot}.pgm")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_pgm(out, gray)
    return [out]


COMMANDS = {
    "generate": cmd_generate,
    "decimate": cmd_decimate,
    "run": cmd_run,
    "evaluate": cmd_evaluate,
    "render": cmd_render,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cobsi-kit", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="flat key = value configuration file")
    p.add_argument("--seed", type=int, help="override 'seed'")
    p.add_argument("--out", help="override the output directory")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        overrides = {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key.strip()] = value.strip()
        if args.seed is not None:
            overrides["seed"] = str(args.seed)
        cfg = load_config(args.config, overrides)
        if args.out is not None:
            cfg.out = str(Path(args.out).resolve())
        with _thread_limit():
            written = COMMANDS[args.command](cfg)
    except NumericalError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    except (CobsiError, ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
