"""Real-time analysis and synthesis with redressed warped Gabor frames."""

from .config import Config, ConfigError, PRESETS, load_config, parse_config, preset
from .engine import (Analyzer, CoefficientStream, EngineError, LatencyReport, Streamer,
                     Synthesizer, analyze, estimate_cost, latency, load_coefficients,
                     pr_diagnostic, roundtrip, save_coefficients, synthesize)
from .framegen import (CacheError, FrameElement, FrameSet, build_frameset, load_frameset,
                       save_frameset)
from .params import FrameConditionError, FrameParams, check_frame_conditions, derive, setup
from .signals import ErrorReport, TestSignal, gen_signal, measure_err, run_suite
from .warpmap import WarpMap, build_exp_map, identity_map
from .window import PrototypeWindow, make_gaussian, make_raised_cosine, make_window

__all__ = [
    "Config", "ConfigError", "PRESETS", "load_config", "parse_config", "preset",
    "Analyzer", "CoefficientStream", "EngineError", "LatencyReport", "Streamer",
    "Synthesizer", "analyze", "estimate_cost", "latency", "load_coefficients",
    "pr_diagnostic", "roundtrip", "save_coefficients", "synthesize",
    "CacheError", "FrameElement", "FrameSet", "build_frameset", "load_frameset",
    "save_frameset",
    "FrameConditionError", "FrameParams", "check_frame_conditions", "derive", "setup",
    "ErrorReport", "TestSignal", "gen_signal", "measure_err", "run_suite",
    "WarpMap", "build_exp_map", "identity_map",
    "PrototypeWindow", "make_gaussian", "make_raised_cosine", "make_window",
]
