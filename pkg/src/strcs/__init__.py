"""Movable-antenna channel estimation by successive transmitter-receiver
compressed sensing."""

from .angles import (
    AngleGrid,
    SparseAngleEstimate,
    correlations,
    dictionary,
    dictionary_column,
    estimate_aoas,
    estimate_aods,
    omp,
    steering_matrix,
    steering_vector,
)
from .fields import (
    Scenario,
    VirtualAngles,
    channel,
    channel_matrix,
    dump_scenario,
    load_scenario,
    r_frv,
    random_scenario,
    t_frv,
    to_virtual,
)
from .measurement import (
    MeasurementRecord,
    StrcsMeasurements,
    Trajectory,
    make_trajectory,
    measure,
    measure_pairs,
    run_strcs_measurements,
)
from .pipeline import StrcsResult, run_strcs
from .prm import (
    AdditionalPositions,
    FriEstimate,
    RankBoundError,
    RankDeficiencyError,
    StackedSystem,
    assemble,
    baseline_positions,
    condition_number,
    estimate_prm,
    min_condition_positions,
    psi_additional,
    psi_r_block,
    psi_t_block,
    reconstruct_channel,
    reconstruct_matrix,
)

__version__ = "0.1.0"
