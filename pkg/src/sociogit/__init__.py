"""Socio-technical mining of local Git repositories."""

from sociogit._version import __version__
from sociogit.calculations import (
    CongruenceScore,
    compute_coordination_needs,
    compute_mirroring_congruence,
    compute_pagerank,
    derive_proxy_communication,
    load_communication_graph,
)
from sociogit.errors import (
    BinaryFile,
    ConfigError,
    CorruptObject,
    DimensionMismatch,
    EmptyEntity,
    EmptyGraph,
    FileNotInTree,
    IoError,
    NotARepository,
    SociogitError,
    UnknownBranch,
)
from sociogit.mappers import (
    AliasTable,
    IdRegistry,
    load_alias_table,
    load_id_map,
    save_mappings,
    user_key,
)
from sociogit.miners import (
    DoaWeights,
    MiningData,
    OwnershipResult,
    mine_assignment_matrix,
    mine_changed_files,
    mine_commit_influence_graph,
    mine_file_dependency_matrix,
    mine_files_ownership,
    mine_work_time,
    raw_doa,
)
from sociogit.pipeline import (
    CALCULATION_NAMES,
    MINER_NAMES,
    RunConfig,
    RunResult,
    run,
)
from sociogit.repo import (
    ADD,
    DELETE,
    MODIFY,
    RENAME,
    CommitMeta,
    CommitPair,
    FileChange,
    LineAttribution,
    blame_file,
    compute_diff,
    open_repository,
    resolve_branches,
    walk_commit_pairs,
)
from sociogit.synthetic import generate_synthetic_repo

__all__ = [
    "ADD",
    "AliasTable",
    "BinaryFile",
    "CALCULATION_NAMES",
    "CommitMeta",
    "CommitPair",
    "ConfigError",
    "CongruenceScore",
    "CorruptObject",
    "DELETE",
    "DimensionMismatch",
    "DoaWeights",
    "EmptyEntity",
    "EmptyGraph",
    "FileChange",
    "FileNotInTree",
    "IdRegistry",
    "IoError",
    "LineAttribution",
    "MINER_NAMES",
    "MODIFY",
    "MiningData",
    "NotARepository",
    "OwnershipResult",
    "RENAME",
    "RunConfig",
    "RunResult",
    "SociogitError",
    "UnknownBranch",
    "blame_file",
    "compute_coordination_needs",
    "compute_diff",
    "compute_mirroring_congruence",
    "compute_pagerank",
    "derive_proxy_communication",
    "generate_synthetic_repo",
    "load_alias_table",
    "load_communication_graph",
    "load_id_map",
    "mine_assignment_matrix",
    "mine_changed_files",
    "mine_commit_influence_graph",
    "mine_file_dependency_matrix",
    "mine_files_ownership",
    "mine_work_time",
    "open_repository",
    "raw_doa",
    "resolve_branches",
    "run",
    "save_mappings",
    "user_key",
    "walk_commit_pairs",
    "__version__",
]
