"""Single-photon frequency conversion in a doubly resonant chi(2) cavity.

The package models a three-level emitter coupled to an emitter-resonant
cavity mode a, which is converted by a classical pump into a telecom mode c
that leaks into a waveguide. See the README for a tour.
"""

__version__ = "0.1.0"

from ._accel import NUMBA_ENABLED, backend  # noqa: E402
from .adiabatic import (  # noqa: E402
    PumpModel,
    calibrate_pump_model,
    efficiency_at_optimum,
    efficiency_closed_form,
    efficiency_max,
    optimal_phi,
    sweep_landscape,
)
from .drive import DrivePulse, adiabatic_gaussian  # noqa: E402
from .dynamics import (  # noqa: E402
    BathConfig,
    Trajectory,
    Wavepacket,
    extract_wavepacket,
    integrate,
    integrate_bath_resolved,
)
from .model import (  # noqa: E402
    CavityMode,
    EmitterParams,
    SystemParams,
    cooperativity_exact,
    cooperativity_geometric,
    kappa_from_Q,
)
from .pulse import shape_drive, simulate_storage, storage_reciprocity  # noqa: E402
