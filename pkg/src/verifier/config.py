"""
Runtime configuration for the verifier.

Values come from config/verification_config.json at the repository root.
Command-line flags override them; nothing is read from the environment.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parents[2]
CONFIG_FILE = REPO_ROOT / "config" / "verification_config.json"

DEFAULT_CONFIG = {
    "config_version": 1,
    "epsilon": 0.1,
    "schedule": "paper",
    "k_max": 12,
    "tol": 1e-6,
    "grid": {
        "radial_samples": 48,
        "theta_samples": 32,
        "interior_margin": 0.1,
    },
    "finite_differences": {
        "step": 1e-5,
        "order": 2,
    },
    "history": {
        "enabled": True,
        "history_file": "data/check_history.json",
        "max_entries": 100,
    },
    "performance": {
        "metrics_enabled": True,
        "metrics_file": "data/run_metrics.json",
    },
}


def load_config(path: Path | str | None = None) -> dict:
    """
    Load configuration from the config file, or use fallback defaults if missing or invalid.

    Args:
        path: Optional override of the config file location.

    Returns:
        dict: Configuration dictionary.
    """
    try:
        with open(path or CONFIG_FILE, "r") as f:
            return json.load(f)
    except Exception as e:
        print(f"❌ Error loading config: {e}", file=sys.stderr)
        return json.loads(json.dumps(DEFAULT_CONFIG))


def section(config: dict, name: str) -> dict:
    """Nested section merged over its defaults, key by key."""
    merged = dict(DEFAULT_CONFIG.get(name, {}))
    merged.update(config.get(name, {}))
    return merged


def resolve_path(relative: str) -> Path:
    p = Path(relative)
    return p if p.is_absolute() else REPO_ROOT / p
