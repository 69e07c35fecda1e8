"""Parameter-free clustering by minimum description length, with the
synthetic benchmarks, baselines, and metrics used to evaluate it.

The hot kernels (nearest-centroid assignment and per-cluster accumulation)
run on a compiled Cython core when the extension is built, with a numpy
fallback selected automatically at import; see ``kstarmeans._core.BACKEND``.
"""

from . import _core
from .baselines import KmeansResult, SweepReport, bic_score, kmeanspp_init, lloyd, sweep_k_bic
from .dataset import (
    CsvFormatError,
    Dataset,
    LabelledDataset,
    PrecisionInfo,
    load_csv,
    precision_info,
)
from .kstar import (
    ClusterModel,
    ConvergenceError,
    FitConfig,
    FitResult,
    assign_step,
    fit,
    init_subcentroids,
    maybe_merge,
    maybe_split,
    seed_model,
    update_step,
)
from .mdl import MdlBreakdown, mdl_cost, merge_delta, split_delta, total_ss
from .metrics import ContingencyTable, accuracy, ari, contingency, k_error, nmi
from .synth import KRecoveryReport, SynthInstance, SynthSpec, bridson_sample, generate
from .synth import k_recovery_experiment

__version__ = "0.1.0"

kernel_backend = _core.BACKEND
