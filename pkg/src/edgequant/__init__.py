"""Edge agreement of second-order multi-agent networks under quantized measurements.

Submodules
----------
graph       incidence matrices, spanning-tree decomposition, essential edge Laplacian
quantizers  uniform and logarithmic quantizers
certify     Lyapunov certificate: gain threshold, agreement radius, decay rate
dynamics    closed-loop RK4 simulation and reduced-model checks
config, csvio, plotting, reference, cli
            scenario files, trajectory I/O, SVG plots, the reference network, CLI
"""

from .certify import (
    GainParams,
    LipschitzBounds,
    StabilityCertificate,
    build_certificate,
    convergence_time,
    envelope,
    estimate_lipschitz,
    solve_lyapunov,
)
from .dynamics import ChuaParams, Trajectory, chua_drift, control_input, reduced_rhs_check, simulate
from .graph import (
    Digraph,
    EdgeDecomposition,
    check_quasi_strong_connectivity,
    decompose,
    spectral_properties,
    verify_similarity_block_form,
)
from .quantizers import QuantizerSpec, quantize_log, quantize_uniform, quantize_vector

__version__ = "0.1.0"
