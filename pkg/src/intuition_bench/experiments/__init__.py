from .protocol import (
    CycleData,
    ExperimentConfig,
    prepare_cycle,
    run_car_protocol,
    run_cycle,
    run_experiment,
    run_poker_protocol,
)
from .predictors import ImportanceDraw, build_experience
from .report import (
    CSV_HEADER,
    CycleReport,
    Method,
    Mode,
    ReportRow,
    TrialResult,
    check_never_zero,
    emit_table,
    error_percentage,
    read_csv,
    timing_report,
    to_rows,
)

__all__ = [
    "CSV_HEADER",
    "CycleData",
    "CycleReport",
    "ExperimentConfig",
    "ImportanceDraw",
    "Method",
    "Mode",
    "ReportRow",
    "TrialResult",
    "build_experience",
    "check_never_zero",
    "emit_table",
    "error_percentage",
    "prepare_cycle",
    "read_csv",
    "run_car_protocol",
    "run_cycle",
    "run_experiment",
    "run_poker_protocol",
    "timing_report",
    "to_rows",
]
