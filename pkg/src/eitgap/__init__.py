"""Light propagation and pulse trapping in standing-wave modulated EIT media.

Static band structure and reflection spectra of the induced photonic bandgap,
plus time-domain evolution of the coupled forward/backward dark-state
polaritons through storage and trapping schedules.
"""

from .bandstructure import (
    BandPoint,
    GapEdges,
    PeriodCell,
    band_edges,
    band_table,
    bloch_k_analytic,
    bloch_k_numeric,
    make_period_cell,
    period_matrix,
)
from .constants import SPEED_OF_LIGHT
from .dynamics import (
    Diagnostics,
    FieldView,
    GridSpec,
    PolaritonState,
    Trajectory,
    analytic_evolution,
    evolve,
    fields_from_polariton,
    gaussian_state,
    measure,
    propagate_spectrum,
    step,
    stretched_time,
)
from .errors import ConfigError, NumericalError, SimulationError, ValidationError
from .medium import (
    DrivePoint,
    DriveSchedule,
    MediumParams,
    Ramp,
    RampSegment,
    eit_response,
    envelope_wavenumber,
    group_velocity,
    light_shift_amplitude,
    mixing_angle,
    refractive_index,
    spatial_light_shift,
)
from .protocol import (
    ProtocolResult,
    Scenario,
    ValidityCheck,
    ValidityReport,
    build_schedule,
    run_protocol,
    validity_report,
)
from .reflection import (
    SampleGeometry,
    ScatterMatrix,
    SpectrumPoint,
    reflection_spectrum,
    sample_geometry,
    sample_scatter,
)

__version__ = "0.1.0"
