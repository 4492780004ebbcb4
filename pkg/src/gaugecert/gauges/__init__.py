"""Gauge zoo: polyhedral and spectral regularizers with face models."""

from .base import Gauge, SubdiffFace, VertexCapExceeded
from .matrix import NuclearGauge, SdpTraceGauge, sym_basis
from .vector import (
    AnalysisL1Gauge,
    GroupL12Gauge,
    L1Gauge,
    NonnegL1Gauge,
    SortedWeightedL1Gauge,
)

KINDS = {
    "l1": L1Gauge,
    "analysis_l1": AnalysisL1Gauge,
    "wsl1": SortedWeightedL1Gauge,
    "group_l12": GroupL12Gauge,
    "nonneg_l1": NonnegL1Gauge,
    "nuclear": NuclearGauge,
    "sdp_trace": SdpTraceGauge,
}

__all__ = [
    "Gauge",
    "SubdiffFace",
    "VertexCapExceeded",
    "L1Gauge",
    "AnalysisL1Gauge",
    "SortedWeightedL1Gauge",
    "GroupL12Gauge",
    "NonnegL1Gauge",
    "NuclearGauge",
    "SdpTraceGauge",
    "sym_basis",
    "KINDS",
]
