"""
Application configuration.

Central configuration file for SpinMate.
Imports tool configuration and reads defaults from environment variables.
"""

import os
from dotenv import load_dotenv
from utils.tool_config import ToolConfig

# Load environment variables
load_dotenv()

# Tool configuration
tool_config = ToolConfig()

# Name of the environment variable holding the default seed
SEED_ENV_VAR = "SPINMATE_SEED"

# Logging
LOG_LEVEL = os.getenv("SPINMATE_LOG_LEVEL", "WARNING")


def default_seed() -> int:
    """Seed used when --seed is absent; SPINMATE_SEED overrides the built-in 42."""
    raw = os.getenv(SEED_ENV_VAR, "").strip()
    if not raw:
        return tool_config.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")
