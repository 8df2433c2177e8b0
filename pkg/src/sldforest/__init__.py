"""Dynamic single-linkage dendrograms over weighted forests."""
from .core import ROOT, Edge, EdgeKey, SLDError, UpdateReport, edge_key, rank_less, serialize_canonical
from .dendrogram import DendrogramState
from .oracle import kruskal_sld
from .rc_tree import RCForest
from .updates import MODES, PAR_H, PAR_OS, SEQ_H, SEQ_OS

__all__ = [
    "ROOT", "Edge", "EdgeKey", "SLDError", "UpdateReport", "edge_key", "rank_less",
    "serialize_canonical", "DendrogramState", "kruskal_sld", "RCForest",
    "MODES", "SEQ_H", "SEQ_OS", "PAR_H", "PAR_OS",
]
