from .schedule import DEFAULT_GRID_DT, SimulationGrid, TransmissionSchedule
from .superposition import SimulationResult, end_to_end, simulate_chain, superpose
from .isi import baseline_drift_fraction, inter_pulse_minima
from .sweep import DEFAULT_SYMBOL_PERIODS, PULSES_PER_SEQUENCE, SweepPoint, run_symbol_period, run_symbol_period_sweep
