from .csv_traces import (
    CONCENTRATION_COLUMN,
    FLOAT_FORMAT,
    TIME_COLUMN,
    VOLTAGE_COLUMN,
    RawTrace,
    average_traces,
    load_csv,
    sanitize,
    save_csv,
)
from .alignment import align, apply_lag, resample
from .validation import ComparedTraces, compare_with_model, model_prediction, validate
