from .core import (
    Bin,
    BinKind,
    BinLabel,
    ConeParams,
    OutOfConeError,
    Packing,
    ReservedSlot,
    TraceStep,
    Vec2,
    fits,
    in_cone,
    l1_norm,
    linf_norm,
    load,
    opt_load_lower_bound,
    validate_packing,
)
from .schemas import BenchRow, InstanceFile, SolverAudit, TapeContainer, TraceRecord, WitnessFile
from .engine import (
    AdviceMismatchError,
    BestFit,
    FirstFit,
    NextFit,
    OnlineStrategy,
    RunReport,
    StrategyError,
    check_anyfit,
    run_online,
)
from .advice import AdviceTape, BitString, MalformedTapeError, RestrictedAdvice, ScaledAdvice, write_tape
from .restricted import (
    AGammaStrategy,
    RestrictedParams,
    Variant,
    classify,
    combined_bound,
    combined_dispatch,
    competitive_bound,
    make_params,
    plan_critical_bins,
)
from .scaled import (
    AkStrategy,
    ScaledMode,
    ScaledParams,
    box_of,
    is_short,
    k_scale,
    repack_two_and_half,
    solve_scaled_opt,
)
from .advice.oracle import oracle_restricted, oracle_scaled
from .exact import BudgetExhaustedError, ExactResult, exact_opt, verify_witness
from .generators import (
    GeneratedInstance,
    anyfit_lower_bound_instance,
    even_k_tightness,
    odd_k_adversary,
    random_cone_instance,
)
from .config import Defaults, EnvVars, Settings
from .harness import BenchHarness, StrategySpec, make_strategy

__all__ = [
    "Bin",
    "BinKind",
    "BinLabel",
    "ConeParams",
    "OutOfConeError",
    "Packing",
    "ReservedSlot",
    "TraceStep",
    "Vec2",
    "fits",
    "in_cone",
    "l1_norm",
    "linf_norm",
    "load",
    "opt_load_lower_bound",
    "validate_packing",
    "BenchRow",
    "InstanceFile",
    "SolverAudit",
    "TapeContainer",
    "TraceRecord",
    "WitnessFile",
    "AdviceMismatchError",
    "BestFit",
    "FirstFit",
    "NextFit",
    "OnlineStrategy",
    "RunReport",
    "StrategyError",
    "check_anyfit",
    "run_online",
    "AdviceTape",
    "BitString",
    "MalformedTapeError",
    "RestrictedAdvice",
    "ScaledAdvice",
    "write_tape",
    "AGammaStrategy",
    "RestrictedParams",
    "Variant",
    "classify",
    "combined_bound",
    "combined_dispatch",
    "competitive_bound",
    "make_params",
    "plan_critical_bins",
    "AkStrategy",
    "ScaledMode",
    "ScaledParams",
    "box_of",
    "is_short",
    "k_scale",
    "repack_two_and_half",
    "solve_scaled_opt",
    "oracle_restricted",
    "oracle_scaled",
    "BudgetExhaustedError",
    "ExactResult",
    "exact_opt",
    "verify_witness",
    "GeneratedInstance",
    "anyfit_lower_bound_instance",
    "even_k_tightness",
    "odd_k_adversary",
    "random_cone_instance",
    "Defaults",
    "EnvVars",
    "Settings",
    "BenchHarness",
    "StrategySpec",
    "make_strategy",
]
