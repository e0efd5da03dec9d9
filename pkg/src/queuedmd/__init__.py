"""Data-driven linear models of signalized-intersection queues (DMDc / Hankel DMDc)."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .linalg import pinv, svd, truncate  # noqa: E402
from .metrics import geh, pearson_cc, rmse_mae  # noqa: E402
from .predict import error_series, rollout, spectral_stability  # noqa: E402
from .simqueue import IntersectionConfig, Phase, SignalPlan, default_config, signal_state, simulate  # noqa: E402
from .snapshots import (  # noqa: E402
    ControlSequence,
    TimeSeries,
    build_hankel_pair,
    build_snapshot_pair,
    hankel_embed,
)
from .sysid import LinearModel, dmd, dmdc, extract_current_block, hdmdc  # noqa: E402

__all__ = [
    "ControlSequence", "IntersectionConfig", "LinearModel", "Phase", "SignalPlan", "TimeSeries",
    "build_hankel_pair", "build_snapshot_pair", "default_config", "dmd", "dmdc", "error_series",
    "extract_current_block", "geh", "hankel_embed", "hdmdc", "pearson_cc", "pinv", "rmse_mae",
    "rollout", "signal_state", "simulate", "spectral_stability", "svd", "truncate",
]
