"""Accuracy benchmarking of surface-code decoders.

Build a rotated surface code, decode syndromes with minimum-weight
perfect matching, belief propagation + OSD, or an exhaustive lookup
table, and classify exactly which bit-flip errors each decoder fails on.
"""

from .bposd import BposdDecoder, bp_decode, bposd_decode, build_tanner_graph, osd_decode
from .code_model import (
    Classification,
    SurfaceCode,
    build_code,
    classify_residual,
    syndrome_of,
    syndromes_of_array,
    weight,
    x_stabilizer_generators,
)
from .decoder_api import DecodeOutcome, Decoder, DecoderConfig, DecoderId, decode
from .feasibility import (
    LUMI_CORES,
    TimingProfile,
    extrapolate_multicore,
    extrapolate_single_core,
    feasibility_report,
    measure_rates,
)
from .harness import (
    ComparisonStats,
    FailureRecord,
    build_outcome_table,
    failure_ratio,
    merge_stats,
    read_stats_csv,
    run_exhaustive,
    run_sampled,
    venn_counts,
    write_stats_csv,
)
from .lut import (
    LookupTable,
    LutDecoder,
    build_lut,
    load_lut,
    lut_decode,
    save_lut,
)
from .mwpm import DetectionGraph, MwpmDecoder, build_detection_graph, mwpm_decode
from .threshold import (
    CrossingResult,
    DecoderParityCache,
    ThresholdPoint,
    exact_logical_rate,
    find_crossing,
    logical_error_rate,
    sweep,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
