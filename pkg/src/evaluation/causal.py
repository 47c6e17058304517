from __future__ import annotations

import logging
from typing import Optional

from data import Table, numeric_matrix
from discovery import PcConfig, discover
from graph import CausalGraph, shd

logger = logging.getLogger("run")


def full_depth(config: Optional[PcConfig], n_nodes: int) -> PcConfig:
    base = config or PcConfig()
    return base.with_depth(max(base.max_depth, n_nodes - 2))


def causal_shd_eval(truth: CausalGraph, fake: Table, pc_config: Optional[PcConfig] = None) -> int:
    """SHD between ``truth`` and the DAG PC recovers from ``fake`` with unrestricted depth."""
    if fake.n_columns != truth.n_nodes:
        raise ValueError(
            f"table has {fake.n_columns} columns but the graph has {truth.n_nodes} nodes"
        )
    cfg = full_depth(pc_config, truth.n_nodes)
    res = discover(numeric_matrix(fake), cfg, labels=fake.schema.names)
    for f in res.flags:
        logger.warning("EVAL SHD FLAG %s", f)
    value = shd(truth, res.dag)
    logger.info(
        "EVAL SHD nodes=%d edges_true=%d edges_found=%d shd=%d",
        truth.n_nodes,
        truth.n_edges,
        res.dag.n_edges,
        value,
    )
    return value
