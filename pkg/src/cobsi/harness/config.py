"""
Flat ``key = value`` experiment configuration.

Lines starting with ``#`` (or trailing ``# ...``) are comments. Keys are
namespaced, e.g. ``pe.M``, ``train.lr``, ``sbi.lambda``. Unknown keys are
rejected. When ``recipe`` is set, encoding and network settings default to
that recipe's values; otherwise they follow the Experiment-I row of the
parameter table (Gamma_121, 128 neurons, 15 hidden layers, lr 1e-3,
1000 epochs).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from ..baselines import MssaConfig, SbiConfig
from ..encoding import EncodingSpec
from ..errors import ConfigError
from ..neuralnet import TrainConfig
from .recipes import RECIPES, get_recipe

METHODS = ("cobsi", "sbi", "mssa", "dmssa")
RENDER_MODES = ("shot", "error", "fk")


def _int_list(text: str) -> Tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(p) for p in text.replace(";", ",").split(",") if p.strip())


def _str_list(text: str) -> Tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "auto", "none") else int(text)


# key -> (attribute, parser)
_KEYS = {
    "recipe": ("recipe", str),
    "seed": ("seed", int),
    "out": ("out", str),
    "experiment": ("experiment", str),
    "events": ("events", str),
    "cube": ("cube", str),
    "truth": ("truth", str),
    "observed": ("observed", str),
    "geometry": ("geometry", str),
    "mask": ("mask", str),
    "method": ("method", str),
    "generate.noise_sigma": ("noise_sigma", float),
    "generate.source_line_offset": ("source_line_offset", float),
    "generate.wavelet_freq": ("wavelet_freq", float),
    "decimate.missing": ("missing", _int_list),
    "pe.M": ("pe_M", int),
    "pe.N": ("pe_N", int),
    "pe.K": ("pe_K", int),
    "pe.sampling": ("pe_sampling", str),
    "mlp.width": ("width", int),
    "mlp.hidden_layers": ("hidden_layers", int),
    "train.lr": ("lr", float),
    "train.epochs": ("epochs", int),
    "train.batch_size": ("batch_size", _opt_int),
    "train.precision": ("precision", str),
    "sbi.lambda": ("sbi_lambda", float),
    "sbi.rho": ("sbi_rho", float),
    "sbi.iters": ("sbi_iters", int),
    "sbi.tol": ("sbi_tol", float),
    "sbi.project": ("sbi_project", _bool),
    "mssa.rank": ("mssa_rank", int),
    "mssa.damping": ("mssa_damping", int),
    "mssa.iters": ("mssa_iters", int),
    "mssa.fmax": ("mssa_fmax", float),
    "evaluate.methods": ("eval_methods", _str_list),
    "render.mode": ("render_mode", str),
    "render.input": ("render_input", str),
    "render.shot": ("render_shot", int),
    "render.output": ("render_output", str),
}


@dataclass
class ExperimentConfig:
    recipe: Optional[str] = None
    seed: int = 0
    out: str = "."
    experiment: Optional[str] = None
    events: Optional[str] = None
    cube: Optional[str] = None
    truth: Optional[str] = None
    observed: Optional[str] = None
    geometry: Optional[str] = None
    mask: Optional[str] = None
    method: str = "cobsi"
    noise_sigma: float = 0.0
    source_line_offset: Optional[float] = None
    wavelet_freq: Optional[float] = None
    missing: Optional[Tuple[int, ...]] = None
    pe_M: Optional[int] = None
    pe_N: Optional[int] = None
    pe_K: Optional[int] = None
    pe_sampling: Optional[str] = None
    width: Optional[int] = None
    hidden_layers: Optional[int] = None
    lr: Optional[float] = None
    epochs: Optional[int] = None
    batch_size: Optional[int] = None
    precision: Optional[str] = None
    sbi_lambda: Optional[float] = None
    sbi_rho: Optional[float] = None
    sbi_iters: Optional[int] = None
    sbi_tol: Optional[float] = None
    sbi_project: bool = True
    mssa_rank: Optional[int] = None
    mssa_damping: Optional[int] = None
    mssa_iters: Optional[int] = None
    mssa_fmax: Optional[float] = None
    eval_methods: Tuple[str, ...] = METHODS
    render_mode: str = "shot"
    render_input: Optional[str] = None
    render_shot: Optional[int] = None
    render_output: Optional[str] = None
    base_dir: Path = field(default=Path("."), repr=False)

    def validate(self) -> "ExperimentConfig":
        if self.recipe is not None and self.recipe not in RECIPES:
            raise ConfigError(f"unknown recipe {self.recipe!r}; choose from {sorted(RECIPES)}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        bad = [m for m in self.eval_methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods in evaluate.methods: {bad}")
        if self.render_mode not in RENDER_MODES:
            raise ConfigError(f"render.mode must be one of {RENDER_MODES}")
        try:
            self.encoding()
            self.train_config()
            self.sbi_config()
            self.mssa_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    # -- paths -----------------------------------------------------------
    def path(self, value: Optional[str], default_name: str) -> Path:
        """Resolve a configured path (relative to the config file) or an output default."""
        if value:
            p = Path(value)
            return p if p.is_absolute() else self.base_dir / p
        return self.out_dir / default_name

    @property
    def out_dir(self) -> Path:
        p = Path(self.out)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def experiment_name(self) -> str:
        return self.experiment or self.recipe or "experiment"

    # -- method settings ---------------------------------------------------
    def _recipe(self):
        return get_recipe(self.recipe) if self.recipe else None

    def encoding(self) -> EncodingSpec:
        rec = self._recipe()
        base = rec.encoding if rec else EncodingSpec(1, 2, 1, "linear")
        return EncodingSpec(
            self.pe_M if self.pe_M is not None else base.M,
            self.pe_N if self.pe_N is not None else base.N,
            self.pe_K if self.pe_K is not None else base.K,
            self.pe_sampling or base.sampling,
        )

    def network(self) -> Tuple[int, int]:
        rec = self._recipe()
        width = self.width if self.width is not None else (rec.width if rec else 128)
        hidden = self.hidden_layers if self.hidden_layers is not None else (rec.hidden_layers if rec else 15)
        if width < 1 or hidden < 1:
            raise ConfigError("mlp.width and mlp.hidden_layers must be positive")
        return width, hidden

    def train_config(self) -> TrainConfig:
        rec = self._recipe()
        return TrainConfig(
            learning_rate=self.lr if self.lr is not None else (rec.learning_rate if rec else 1e-3),
            epochs=self.epochs if self.epochs is not None else (rec.epochs if rec else 1000),
            batch_size=self.batch_size if self.batch_size is not None else (rec.batch_size if rec else None),
            seed=self.seed,
            precision=self.precision or (rec.precision if rec else "float64"),
        )

    def sbi_config(self) -> SbiConfig:
        cfg = SbiConfig()
        updates = {}
        if self.sbi_lambda is not None:
            updates["lam"] = self.sbi_lambda
        if self.sbi_rho is not None:
            updates["rho"] = self.sbi_rho
        if self.sbi_iters is not None:
            updates["max_iters"] = self.sbi_iters
        if self.sbi_tol is not None:
            updates["tol_primal"] = updates["tol_dual"] = self.sbi_tol
        updates["project"] = self.sbi_project
        return replace(cfg, **updates)

    def mssa_config(self, method: Optional[str] = None) -> MssaConfig:
        method = method or self.method
        damping = self.mssa_damping
        if damping is None:
            damping = 3 if method == "dmssa" else 0
        elif method == "mssa":
            damping = 0
        cfg = MssaConfig(damping=damping)
        updates = {}
        if self.mssa_rank is not None:
            updates["rank"] = self.mssa_rank
        if self.mssa_iters is not None:
            updates["iters"] = self.mssa_iters
        if self.mssa_fmax is not None:
            updates["fmax"] = self.mssa_fmax
        return replace(cfg, **updates)


def parse_config_text(text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(values: Dict[str, str], base_dir: Path = Path(".")) -> ExperimentConfig:
    cfg = ExperimentConfig(base_dir=Path(base_dir))
    for key, raw in values.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        attr, parse = _KEYS[key]
        try:
            setattr(cfg, attr, parse(raw))
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc
    return cfg.validate()


def load_config(path, overrides: Optional[Dict[str, str]] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    values.update(overrides or {})
    return build_config(values, base_dir=path.parent)
