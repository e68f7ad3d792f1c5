"""approvalmaps: sample, compare, and map approval elections.

A library and CLI for drawing approval elections from parameterized random
models, measuring distances between whole elections, computing committee
statistics (approval scores, cohesive-group structure, exact proportional
committees), and rendering 2D maps of election datasets.
"""

__version__ = "0.1.0"

from .committees import (
    CohesivenessResult,
    Committee,
    PavResult,
    av_committee,
    cohesiveness_level,
    max_approval_score,
    pav_committee,
    pav_score,
    pav_score_exact,
    voters_in_1cohesive_fraction,
)
from .core import (
    ApprovalwiseVector,
    CapExceededError,
    Election,
    approval_score,
    approvalwise_vector,
    election_from_json,
    election_from_text,
    election_to_json,
    election_to_text,
    load_election,
    make_rng,
    save_election,
    spawn_seed,
    vote_hamming,
    vote_jaccard,
)
from .cultures import (
    CultureSpec,
    make_extreme,
    noise_weight,
    open_interval_grid,
    sample_culture,
    sample_disjoint,
    sample_euclidean,
    sample_noise,
    sample_resampling,
    sample_urn,
)
from .embedding import (
    EmbeddingConfig,
    MapEmbedding,
    MapPoint,
    embed,
    map_points_from_csv,
    map_points_to_csv,
    stress,
)
from .experiments import (
    CorrelationReport,
    DatasetManifest,
    ManifestEntry,
    StatRow,
    build_background,
    build_correlation_manifest,
    build_culture_datasets,
    run_correlation,
    run_statistics,
    stats_from_csv,
    stats_to_csv,
)
from .ingest import (
    PabulibInstance,
    PabulibParseError,
    parse_pabulib,
    parse_pabulib_file,
    subsample,
    to_election,
)
from .metrics import (
    DistanceMatrix,
    GridPoint,
    analytic_av,
    analytic_distance,
    approvalwise_distance,
    isomorphic_hamming,
    pairwise_distances,
)
from .render import RenderConfig, render_svg
