"""Data models for the missing-digit laboratory."""

from src.models.arcs import (
    ArcMode,
    ArcPartition,
    ExpSumValue,
    MainTermReport,
    MajorArc,
    MinorArc,
    RationalApprox,
)
from src.models.density import (
    DensityKind,
    FiniteJSum,
    LocalDensityTable,
    SeriesVariant,
    SingularSeries,
)
from src.models.digitset import (
    DigitSet,
    FourierDecayReport,
    FourierValue,
    HybridSumReport,
    StringModel,
)
from src.models.experiment import (
    Budgets,
    ExperimentConfig,
    ExperimentResult,
    LabConfig,
    Mode,
)
from src.models.ledger import (
    CollisionQuadruple,
    GaussianSplit,
    LedgerSummary,
    Representation,
    RepresentationLedger,
)
from src.models.sieve import DensitySumReport, SieveConfig, SieveWeights

__all__ = [
    "ArcMode",
    "ArcPartition",
    "Budgets",
    "CollisionQuadruple",
    "DensityKind",
    "DensitySumReport",
    "DigitSet",
    "ExpSumValue",
    "ExperimentConfig",
    "ExperimentResult",
    "FiniteJSum",
    "FourierDecayReport",
    "FourierValue",
    "GaussianSplit",
    "HybridSumReport",
    "LabConfig",
    "LedgerSummary",
    "LocalDensityTable",
    "MainTermReport",
    "MajorArc",
    "MinorArc",
    "Mode",
    "RationalApprox",
    "Representation",
    "RepresentationLedger",
    "SeriesVariant",
    "SieveConfig",
    "SieveWeights",
    "SingularSeries",
    "StringModel",
]
