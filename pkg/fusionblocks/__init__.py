from __future__ import annotations

from fusionblocks.core.catalog import by_name
from fusionblocks.core.fusion_ring import FusionData
from fusionblocks.core.moduli_rank import (
    RankQuery,
    rank_closed_form,
    rank_dual_graph,
)

__version__ = '0.1.0'

__all__ = [
    'FusionData',
    'RankQuery',
    'by_name',
    'rank_closed_form',
    'rank_dual_graph',
]
