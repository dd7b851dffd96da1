"""
Configuration settings for the Type IIA flow laboratory.
Presets trade grid resolution against run time; environment variables cap parallelism and memory.
"""
import logging
import math
import os

logger = logging.getLogger(__name__)

# Grid and flow presets
CONFIGURATIONS = {
    "ci": {
        "n": 8,
        "shape": (8, 8, 4, 4, 1, 1),   # reduced grid, four resolved axes
        "length": 2 * math.pi,
        "dt_safety": 0.5,
        "monitor_stride": 5,
        "t_max": 1.0,
        "stationary_tol": 1e-12,
        "description": "CI - n=8 reduced grid, identity and invariant suites in seconds"
    },

    "standard": {
        "n": 8,
        "shape": None,             # 8^6 ~ 2.6e5 points
        "length": 2 * math.pi,
        "dt_safety": 0.5,
        "monitor_stride": 10,
        "t_max": 5.0,
        "stationary_tol": 1e-12,
        "description": "Standard - full 8^6 grid for identity checks on fields"
    },

    "decay": {
        "n": 16,
        "shape": (16, 16, 1, 1, 1, 1),   # perturbations live on the (x1, x2) sub-torus
        "length": 2 * math.pi,
        "dt_safety": 0.5,
        "monitor_stride": 10,
        "t_max": 12.0,
        "stationary_tol": 1e-9,
        "description": "Decay - n=16 reduced grid for exponential decay fits"
    },

    "acceptance": {
        "n": 16,
        "shape": (16, 16, 4, 4, 1, 1),
        "length": 2 * math.pi,
        "dt_safety": 0.5,
        "monitor_stride": 10,
        "t_max": 30.0,
        "stationary_tol": 1e-8,
        "description": "Acceptance - n=16 reduced grid for perturb-and-flow runs"
    }
}

# Default configuration (can be changed here)
DEFAULT_CONFIG = "ci"

# Memory cap on the number of grid points of a single field
DEFAULT_MAX_POINTS = 2 ** 21

# Points handed to one pointwise kernel call
CHUNK_SIZE = 4096


def get_config(config_name=None):
    """Get configuration by name or return default"""
    if config_name is None:
        config_name = DEFAULT_CONFIG

    if config_name not in CONFIGURATIONS:
        logger.warning("Configuration '%s' not found. Using default: %s", config_name, DEFAULT_CONFIG)
        config_name = DEFAULT_CONFIG

    return dict(CONFIGURATIONS[config_name])


def list_configurations():
    """List all available configurations"""
    print("Available configurations:")
    for name, config in CONFIGURATIONS.items():
        shape = config["shape"] or (config["n"],) * 6
        print(f"  {name}: {config['description']}")
        print(f"    Grid: {'x'.join(str(size) for size in shape)} points, period {config['length']:.6g}")
        print(f"    Flow: dt_safety={config['dt_safety']}, t_max={config['t_max']}")
        print()


def kernel_threads():
    """Number of threads kernels may use (IIA_THREADS, default 1)"""
    raw = os.environ.get("IIA_THREADS", "1")
    try:
        threads = int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer IIA_THREADS=%r", raw)
        return 1
    return max(1, threads)


def max_points():
    """Grid memory cap (IIA_MAX_POINTS overrides the default)"""
    raw = os.environ.get("IIA_MAX_POINTS")
    if raw is None:
        return DEFAULT_MAX_POINTS
    try:
        return int(raw)
    except ValueError:
        logger.warning("Ignoring non-integer IIA_MAX_POINTS=%r", raw)
        return DEFAULT_MAX_POINTS
