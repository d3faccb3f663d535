"""Lossless compression of mixtures of (non-orthogonal) quantum strings."""

from .channelsim import (
    ChannelState,
    NoiseConfig,
    append_message,
    average_length_code,
    channel_init,
    channel_step,
    compare_noise,
    disturbance_report,
    lossy_truncate,
    transmit,
)
from .codec import (
    LosslessCode,
    SideChannelMessage,
    assign_codewords,
    brute_force_optimal,
    build_code,
    check_entropy_bounds,
    decode,
    encode,
    expected_base_length,
    make_side_channel,
    parse_side_channel,
)
from .decomposition import (
    Decomposition,
    Ensemble,
    Subspace,
    average_probability,
    decompose,
    density_operator,
    lies_within,
    relative_average_probability,
    relative_probability,
    subspace_probability,
    von_neumann_entropy,
)
from .estimator import AverageLengthCompressor, LosslessQuantumCompressor
from .fockstring import (
    FockVector,
    RegisterVector,
    average_length,
    base_length,
    concatenate,
    inner_product,
    parse_state,
    format_state,
    zero_extended_form,
)
from .prefix import (
    CondensedBlock,
    PrefixFreeBasis,
    condense,
    expand,
    expand_joint,
    is_prefix,
    is_prefix_free_set,
    is_prefix_free_space,
    kraft_sums,
)

__version__ = "0.1.0"
