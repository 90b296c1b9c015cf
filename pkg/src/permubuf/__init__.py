"""Exact analysis of Random Permutation for m-buffer, B=1 packet buffering."""

from ._accel import BACKEND
from .errors import (
    CostRefusalError,
    EnumerationInfeasibleError,
    ExactArithmeticError,
    InvalidComparisonError,
    InvalidParameterError,
    InvalidPermutationError,
    PermubufError,
    ScheduleFormatError,
    StateSpaceInfeasibleError,
)
from .exact import (
    AcceptanceProfile,
    ExactProb,
    QTable,
    SumComparison,
    acceptance_profile,
    compare_sums,
    q_table,
    verify_paper_values,
)
from .model import (
    ArrivalSchedule,
    PacketRecord,
    RunTrace,
    classify_packets,
    counterexample_schedule,
    load_schedule,
    run_deterministic,
    save_schedule,
    systematic_schedule,
)
from .montecarlo import MCEstimate, estimate_profile
from .opt import OptResult, opt_accommodates_all, opt_throughput
from .search import SearchReport, SearchSpace, enumerate_family, find_violations

__version__ = "0.1.0"
