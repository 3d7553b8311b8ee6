"""Graph coarsening onto terminal vertices and random-walk embeddings.

The main entry points:

- :func:`schur_complement` / :func:`random_contraction` reduce a graph
  onto a terminal set, exactly or in expectation.
- :func:`embed_graph` computes NetMF / NetMFSC embeddings.
- :mod:`schurcoarse.oracle` and :mod:`schurcoarse.verify` hold the dense
  reference implementations and randomised identity checks.
"""
from .coarsen import (
    CoarsenConfig,
    DegenerateVertexError,
    DegenerateVertexWarning,
    DegreeBucketQueue,
    RunReport,
    coarsen,
    contract_vertex,
    eliminate_vertex_schur,
    random_contraction,
    schur_complement,
)
from .embed import (
    Embedding,
    WalkParams,
    embed_graph,
    limit_poly_g,
    limit_poly_h,
    netmf_poly,
    netmfsc_poly,
    truncated_log,
    truncated_svd,
)
from .graph import (
    Graph,
    GraphFormatError,
    apply_theta,
    parse_edge_list,
    read_edge_list,
    save_edge_list,
    to_dense,
    write_edge_list,
)

__version__ = "0.1.0"
