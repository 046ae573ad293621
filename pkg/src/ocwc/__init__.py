"""Consistency-based feature selection over encrypted bits.

The package stacks four layers: plaintext oracles (dataset handling and the
reference selection sweep), an encrypted-bit gate layer with transcripts,
oblivious sorting networks, and the two selection circuits plus the
single-round protocol, CLI, and benchmark harness on top.
"""

from .dataset import (
    Dataset,
    FeatureMask,
    PaddedDataset,
    decode_selection,
    gen_dataset,
    load_csv,
    pad,
    save_csv,
)
from .errors import (
    BackendError,
    DataError,
    GateBudgetExceeded,
    OcwcError,
    UsageError,
)
from .obool import (
    DEFAULT_GATE_COSTS,
    Backend,
    ObliviousBit,
    ObliviousWord,
    RecordedCircuit,
    SimBackend,
    Transcript,
    add,
    add_bit,
    cmp_gt,
    const_word,
    decrypt_word,
    encrypt_word,
    eq,
    mux,
    or_bit,
    parse_cost_table,
    transcript_digest,
)
from .oracle import (
    SelectionResult,
    cwc_select,
    is_consistent,
    minimal_consistent_bruteforce,
    mutual_information,
)
from .pcwc import (
    EncryptedDatasetState,
    LabelState,
    SelectionMaskCipher,
    compute_prefix_labels,
    consistency_bit,
    encrypt_dataset,
    improved_select,
    naive_select,
    plaintext_input_vector,
    select,
    sort_by_feature_vector,
)
from .protocol import (
    ProtocolResult,
    decode_dataset_message,
    decode_mask_message,
    encode_dataset_message,
    encode_mask_message,
    keygen,
    load_key,
    run_protocol,
)
from .sortnet import (
    KeyedRecord,
    KeyedRecordSet,
    SortingNetwork,
    expected_comparator_count,
    generate_network,
    inverse_permutation,
    oblivious_sort,
    with_stability_suffix,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "OcwcError",
    "UsageError",
    "DataError",
    "BackendError",
    "GateBudgetExceeded",
    # datasets
    "Dataset",
    "PaddedDataset",
    "FeatureMask",
    "load_csv",
    "save_csv",
    "pad",
    "decode_selection",
    "gen_dataset",
    # plaintext oracles
    "is_consistent",
    "cwc_select",
    "SelectionResult",
    "mutual_information",
    "minimal_consistent_bruteforce",
    # gate layer
    "Backend",
    "SimBackend",
    "Transcript",
    "ObliviousBit",
    "ObliviousWord",
    "RecordedCircuit",
    "add",
    "add_bit",
    "cmp_gt",
    "eq",
    "mux",
    "or_bit",
    "const_word",
    "encrypt_word",
    "decrypt_word",
    "transcript_digest",
    "parse_cost_table",
    "DEFAULT_GATE_COSTS",
    # sorting networks
    "SortingNetwork",
    "generate_network",
    "expected_comparator_count",
    "KeyedRecord",
    "KeyedRecordSet",
    "with_stability_suffix",
    "oblivious_sort",
    "inverse_permutation",
    # selection circuits
    "EncryptedDatasetState",
    "LabelState",
    "SelectionMaskCipher",
    "encrypt_dataset",
    "plaintext_input_vector",
    "sort_by_feature_vector",
    "compute_prefix_labels",
    "consistency_bit",
    "naive_select",
    "improved_select",
    "select",
    # protocol
    "keygen",
    "load_key",
    "encode_dataset_message",
    "decode_dataset_message",
    "encode_mask_message",
    "decode_mask_message",
    "run_protocol",
    "ProtocolResult",
]
