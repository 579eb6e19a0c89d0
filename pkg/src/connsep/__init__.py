"""Connect / separate analysis on the cubical subdivision of the unit cube."""
from .chessboard import (
    IntegerField,
    Labeling,
    LevelResult,
    VerifyReport,
    Witness,
    exhaustive_verify,
    lebesgue_witness,
    random_verify,
    separating_level,
    steinhaus_witness,
)
from .expr import ExprField, VertexField
from .grid import (
    FaceId,
    FaceLattice,
    GridFace,
    GridSpec,
    SoundnessError,
    UsageError,
    adjacency_threshold,
    intersection_dim,
    touches_face,
)
from .oracle import (
    oracle_closed_components,
    oracle_complement_components,
    oracle_connects,
    oracle_intersection_connects,
    oracle_separates,
)
from .scalar_field import (
    CertifiedSets,
    FiberBracket,
    bracket_sets,
    cell_range,
    certify_conn,
    certify_not_conn,
    certify_not_sep,
    certify_sep,
    fiber_bracket,
    pm_product_witness,
    pm_sign_check,
)
from .synthesis import (
    ConnSepSpec,
    LevelSet,
    SynthesizedField,
    build_function,
    evaluate,
    validate_spec,
    verify_round_trip,
)
from .topology import (
    CellSet,
    Chain,
    SeparationCertificate,
    complement_adjacent,
    complement_components,
    components,
    connects,
    separates,
    separates_all_axes,
)

__version__ = "0.1.0"
