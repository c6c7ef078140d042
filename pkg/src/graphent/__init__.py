"""Graph states built from controlled-phase gates and the geometric entanglement of their qubits."""

__version__ = "0.1.0"

from .analytic import AnalyticRecord, analytic_entanglement, analytic_pauli_means, z_factor
from .circuit import (
    Circuit,
    GateKind,
    GateOp,
    append_measurement,
    build_preparation_circuit,
    export_openqasm,
    simulate,
)
from .errors import ExportError, GraphentError, ParseError, ResourceError, ValidationError
from .graph import Graph, degree, generate_named, neighborhood, parse_edge_list, serialize_edge_list
from .measurement import (
    NoiseModel,
    SampledEstimate,
    ShotCounts,
    bundled_calibration,
    estimate_entanglement,
    estimate_entanglement_noisy,
    estimate_pauli,
    gate_noise_channel,
    load_calibration,
    parse_calibration,
    pre_rotation,
    sample_counts,
)
from .statevector import (
    PrepParams,
    StateVector,
    apply_controlled_phase,
    apply_single_qubit,
    entanglement_from_rdm,
    exact_entanglement,
    init_product_state,
    pauli_expectation,
    prepare_graph_state,
    reduced_density_matrix,
)
