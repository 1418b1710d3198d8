"""Experiment harness: recipes, configuration, reports, rendering and the CLI."""
from .config import METHODS, RENDER_MODES, ExperimentConfig, load_config
from .recipes import RECIPES, Recipe, get_recipe
from .report import ReconReport, ReportRow, evaluate, parse_report

__all__ = [
    "METHODS",
    "RENDER_MODES",
    "ExperimentConfig",
    "load_config",
    "RECIPES",
    "Recipe",
    "get_recipe",
    "ReconReport",
    "ReportRow",
    "evaluate",
    "parse_report",
]
