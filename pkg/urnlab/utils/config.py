"""Runtime configuration: .env loading and environment-driven settings."""

import os
from pathlib import Path

# Load .env file if present
PACKAGE_DIR = Path(__file__).resolve().parent.parent
REPO_DIR = PACKAGE_DIR.parent
ENV_FILE = REPO_DIR / ".env"


def load_env_file(path: Path = ENV_FILE) -> int:
    """Copy KEY=VALUE lines from an env file into os.environ without overriding."""
    if not path.exists():
        return 0
    loaded = 0
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#") and "=" in line:
                key, value = line.split("=", 1)
                os.environ.setdefault(key.strip(), value.strip())
                loaded += 1
    return loaded


load_env_file()

DEFAULT_PRECISION = 50
DEFAULT_DATA_DIR = REPO_DIR / "data"


def working_precision() -> int:
    """Decimal digits for mpmath work, from URNLAB_PRECISION."""
    raw = os.environ.get("URNLAB_PRECISION", "")
    try:
        digits = int(raw)
    except ValueError:
        return DEFAULT_PRECISION
    return digits if digits >= 15 else DEFAULT_PRECISION


def data_dir() -> Path:
    """Default output directory for CLI runs."""
    return Path(os.environ.get("URNLAB_DATA_DIR", DEFAULT_DATA_DIR))
