"""Choi-matrix classification of qubit maps and the CP/NCP measure of Pauli channels."""
__version__ = "0.1.0"

from ._backend import BACKEND, COMPILED
from .channels import (
    AffineChannel,
    ChannelClass,
    GeneralUnitalChoi,
    KrausStratum,
    Label,
    PauliChannel,
    QubitState,
    Stratum,
    apply,
    choi_from_affine,
    choi_from_pauli,
    classify,
    classify_pauli,
    det_T,
    kraus_stratum,
    numeric_positivity_check,
    pauli_choi_eigenvalues,
)
from .volume import (
    CP_TETRAHEDRON,
    NCP_COMPLEMENT,
    PTP_CUBE,
    Region,
    VolumeEstimate,
    exact_cp_measure,
    exact_ncp_measure,
    mc_measure,
    sample_channel,
)
