from tate_derham.models.models import (
    ChainMapReport,
    CharVarietyReport,
    CheckResult,
    ChiTransferReport,
    DegreeWindows,
    DrReport,
    ErrorSummary,
    HatInvarianceReport,
    HomotopyReport,
    OffendingEntry,
    RankReport,
    ResidueEulerReport,
    ResolutionReport,
    RunReport,
    ShiftCheckReport,
    SpectralEstimate,
    SpencerReport,
    SuiteReport,
)
