from pydantic import BaseModel, ConfigDict, Field

ETHANOL_MOLAR_MASS = 46.07


class ReceiverParams(BaseModel):
    """
    MOX sensor receiver: static power-law curve, divider circuit, piecewise kinetics and noise.

    Defaults describe the testbed sensor in the bounded duct.

    Attributes:
        reference_resistance (float): R0 in ohm.
        sensitivity_slope (float): Power-law exponent m, negative.
        sensitivity_intercept (float): Log-intercept b.
        circuit_voltage (float): Divider supply V_c in V.
        load_resistance (float): Load R_L in ohm.
        tau_rise (float): Time constant while the static voltage lies above the output, in s.
        tau_decay (float): Time constant otherwise, in s.
        noise_kappa (float): Signal-dependent noise coefficient.
        clean_air_ratio (float): Gamma, clean-air resistance over R0.
        molar_mass (float): Odorant molar mass in g/mol for mol/m^3 to mg/L conversion.
        concentration_floor (float): Smallest concentration fed to the power law, in mg/L.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    reference_resistance: float = Field(302.8, gt=0.0, description="Reference resistance R0 in ohm.")
    sensitivity_slope: float = Field(-1.03, lt=0.0, description="Sensitivity slope m.")
    sensitivity_intercept: float = Field(0.40, description="Sensitivity intercept b.")
    circuit_voltage: float = Field(5.0, gt=0.0, description="Circuit voltage V_c in V.")
    load_resistance: float = Field(20_000.0, gt=0.0, description="Load resistance R_L in ohm.")
    tau_rise: float = Field(0.23, gt=0.0, description="Rise time constant in s.")
    tau_decay: float = Field(30.0, gt=0.0, description="Decay time constant in s.")
    noise_kappa: float = Field(0.01, ge=0.0, description="Noise scaling coefficient kappa.")
    clean_air_ratio: float = Field(60.0, gt=0.0, description="Clean-air intercept Gamma.")
    molar_mass: float = Field(ETHANOL_MOLAR_MASS, gt=0.0, description="Odorant molar mass in g/mol.")
    concentration_floor: float = Field(1e-6, gt=0.0, description="Concentration floor in mg/L.")
