from .params import ETHANOL_MOLAR_MASS, ReceiverParams
from .mox_sensor import (
    baseline_voltage,
    calibrate_intercept,
    clean_air_resistance,
    integrate_kinetics,
    mol_per_m3_to_mg_per_L,
    reference_resistance,
    static_resistance,
    static_voltage,
    step_response,
    to_mg_per_L,
    transition_time,
)
from .noise import add_noise
