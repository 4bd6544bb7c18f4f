import os
import json
from pathlib import Path
from dotenv import load_dotenv

from svg_render import MAX_RENDER_DEPTH

load_dotenv()


def load_render_config(config_path: str) -> dict:
    """
    Load SVG render configuration from JSON file.

    Args:
        config_path: Path to the render configuration JSON file

    Returns:
        Dictionary containing 'size', 'stroke_width' and 'depth'

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If config file is invalid
    """
    path = Path(config_path)

    if not path.exists():
        raise FileNotFoundError(
            f"Render config file not found: {config_path}\n"
            f"Please create it or copy from render_config.example.json"
        )

    try:
        with open(path, "r", encoding="utf-8") as f:
            config = json.load(f)

        # Validate required fields
        if "size" not in config:
            raise ValueError("Config file must contain 'size' field")
        if "stroke_width" not in config:
            raise ValueError("Config file must contain 'stroke_width' field")
        if "depth" not in config:
            raise ValueError("Config file must contain 'depth' field")
        if not isinstance(config["size"], int):
            raise ValueError("'size' must be an integer")
        if not isinstance(config["stroke_width"], (int, float)):
            raise ValueError("'stroke_width' must be a number")
        if not isinstance(config["depth"], int):
            raise ValueError("'depth' must be an integer")
        if config["size"] <= 0:
            raise ValueError("'size' must be greater than 0")
        if config["stroke_width"] <= 0:
            raise ValueError("'stroke_width' must be greater than 0")
        if config["depth"] < 0 or config["depth"] > MAX_RENDER_DEPTH:
            raise ValueError(f"'depth' must be between 0 and {MAX_RENDER_DEPTH}")

        return config

    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in config file: {e}")


# Randomized checks
SPIN_SEED = int(os.getenv("SPIN_SEED", "0"))
SPIN_RANDOM_STATES = int(os.getenv("SPIN_RANDOM_STATES", "100"))
SPIN_RELATOR_STARTS = int(os.getenv("SPIN_RELATOR_STARTS", "50"))
SPIN_WORD_PAIRS = int(os.getenv("SPIN_WORD_PAIRS", "100"))
SPIN_MAX_WORD_LENGTH = int(os.getenv("SPIN_MAX_WORD_LENGTH", "30"))

# Rendering - optional file, otherwise the Farey backdrop depth from env
RENDER_CONFIG_PATH = os.getenv("RENDER_CONFIG_PATH")
SPIN_DEPTH = int(os.getenv("SPIN_DEPTH", "4"))

# Application Configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
