"""Synthetic benchmark generation and the k-recovery experiment.

Cluster centers are placed by Bridson Poisson-disk sampling (guaranteeing a
minimum pairwise separation) in a square around the origin, then each center
receives an equal share of points from an isotropic unit-variance 2-D
Gaussian. The experiment grid runs a clustering algorithm over (k,
separation, repetition) cells with per-cell derived seeds, recording how
often the true cluster count is recovered.
"""

import math
import struct
import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset

BRIDSON_ATTEMPTS = 30  # candidate tries per active point


class ExperimentCellError(RuntimeError):
    """A clustering run failed inside the experiment grid; names the cell."""


@dataclass(frozen=True)
class SynthSpec:
    """Generation parameters for one synthetic instance."""

    true_k: int
    min_sep: float
    total_points: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.true_k < 1:
            raise ValueError("true_k must be >= 1")
        if self.min_sep <= 0:
            raise ValueError("min_sep must be > 0")
        if self.total_points < self.true_k:
            raise ValueError("total_points must be >= true_k")


@dataclass(frozen=True)
class SynthInstance:
    data: Dataset
    labels: np.ndarray         # (n,) generating-center ids
    centroids_true: np.ndarray # (true_k, 2)


@dataclass(frozen=True)
class CellRecord:
    true_k: int
    d_sep: float
    rep: int
    predicted_k: int
    exact: bool
    runtime: float


@dataclass(frozen=True)
class KRecoveryReport:
    per_cell: list
    accuracy: float  # fraction of cells with predicted_k == true_k
    mse: float       # mean squared error of predicted_k
    per_sep: dict = field(default_factory=dict)  # d_sep -> {"accuracy", "mse"}


def bridson_sample(k: int, min_sep: float, rng) -> np.ndarray:
    """Sample k points with pairwise distance >= min_sep by Bridson's
    Poisson-disk algorithm.

    The domain is a square of side min_sep * (ceil(sqrt(k)) + 2) centered at
    the origin; if the packing saturates before k points are accepted, the
    run restarts with the side doubled, which always succeeds eventually.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if min_sep <= 0:
        raise ValueError("min_sep must be > 0")
    side = min_sep * (math.ceil(math.sqrt(k)) + 2)
    while True:
        points = _bridson_once(k, min_sep, side, rng)
        if points is not None:
            return points
        side *= 2


def _bridson_once(k, r, side, rng):
    cell = r / math.sqrt(2.0)
    cells = int(math.ceil(side / cell))
    grid = np.full((cells, cells), -1, dtype=np.int64)
    half = side / 2.0

    def cell_of(p):
        return int((p[0] + half) / cell), int((p[1] + half) / cell)

    def fits(p):
        gx, gy = cell_of(p)
        for cx in range(max(gx - 2, 0), min(gx + 3, cells)):
            for cy in range(max(gy - 2, 0), min(gy + 3, cells)):
                idx = grid[cx, cy]
                if idx < 0:
                    continue
                if np.sum((points[idx] - p) ** 2) < r * r:
                    return False
        return True

    first = rng.uniform(-half, half, size=2)
    points = [first]
    gx, gy = cell_of(first)
    grid[gx, gy] = 0
    active = [0]
    while active and len(points) < k:
        pos = rng.integers(len(active))
        center = points[active[pos]]
        accepted = False
        for _ in range(BRIDSON_ATTEMPTS):
            # Uniform over the annulus [r, 2r) around the active point.
            angle = rng.uniform(0.0, 2.0 * math.pi)
            radius = r * math.sqrt(1.0 + 3.0 * rng.uniform())
            cand = center + radius * np.array([math.cos(angle), math.sin(angle)])
            if not (-half <= cand[0] < half and -half <= cand[1] < half):
                continue
            if not fits(cand):
                continue
            points.append(cand)
            gx, gy = cell_of(cand)
            grid[gx, gy] = len(points) - 1
            active.append(len(points) - 1)
            accepted = True
            break
        if not accepted:
            del active[pos]
    if len(points) < k:
        return None
    return np.asarray(points[:k])


def generate(spec: SynthSpec) -> SynthInstance:
    """Generate a labelled 2-D instance per ``spec``: Bridson-sampled centers
    with floor(total/k) unit-variance Gaussian points each, the remainder
    spread one per center from the front."""
    rng = np.random.default_rng(spec.seed)
    centers = bridson_sample(spec.true_k, spec.min_sep, rng)
    base = spec.total_points // spec.true_k
    remainder = spec.total_points % spec.true_k
    blocks = []
    labels = []
    for i, center in enumerate(centers):
        count = base + (1 if i < remainder else 0)
        blocks.append(rng.normal(loc=center, scale=1.0, size=(count, 2)))
        labels.append(np.full(count, i, dtype=np.int64))
    return SynthInstance(
        data=Dataset(np.concatenate(blocks, axis=0)),
        labels=np.concatenate(labels),
        centroids_true=centers,
    )


def cell_seeds(base_seed: int, true_k: int, d_sep: float, rep: int):
    """Two independent integer seeds (generation, algorithm) derived from the
    cell coordinates, so cells can run in any order or concurrently."""
    sep_bits = struct.unpack("<Q", struct.pack("<d", float(d_sep)))[0]
    ss = np.random.SeedSequence([int(base_seed), int(true_k), sep_bits, int(rep)])
    gen_state, algo_state = ss.generate_state(2, dtype=np.uint64)
    return int(gen_state), int(algo_state)


def k_recovery_experiment(k_range, sep_values, reps: int, algorithm,
                          base_seed: int = 0, total_points: int = 1000) -> KRecoveryReport:
    """Run ``algorithm`` over the (k, separation, rep) grid.

    ``algorithm(data, seed)`` must return a predicted cluster count.
    Failures are re-raised with the cell coordinates attached. Accuracy and
    MSE are aggregated overall and per separation value.
    """
    k_range = list(k_range)
    sep_values = list(sep_values)
    if not k_range or not sep_values or reps < 1:
        raise ValueError("k_range, sep_values must be nonempty and reps >= 1")
    records = []
    for d_sep in sep_values:
        for true_k in k_range:
            for rep in range(reps):
                gen_seed, algo_seed = cell_seeds(base_seed, true_k, d_sep, rep)
                instance = generate(SynthSpec(true_k=true_k, min_sep=d_sep,
                                              total_points=total_points, seed=gen_seed))
                started = time.perf_counter()
                try:
                    predicted = int(algorithm(instance.data, algo_seed))
                except Exception as exc:
                    raise ExperimentCellError(
                        f"clustering failed at cell k={true_k}, d_sep={d_sep}, rep={rep}: {exc}"
                    ) from exc
                records.append(CellRecord(
                    true_k=true_k,
                    d_sep=d_sep,
                    rep=rep,
                    predicted_k=predicted,
                    exact=predicted == true_k,
                    runtime=time.perf_counter() - started,
                ))
    per_sep = {}
    for d_sep in sep_values:
        cells = [r for r in records if r.d_sep == d_sep]
        per_sep[d_sep] = _summarize(cells)
    overall = _summarize(records)
    return KRecoveryReport(per_cell=records, accuracy=overall["accuracy"],
                           mse=overall["mse"], per_sep=per_sep)


def _summarize(cells):
    preds = np.array([c.predicted_k for c in cells], dtype=np.float64)
    trues = np.array([c.true_k for c in cells], dtype=np.float64)
    return {
        "accuracy": float(np.mean(preds == trues)),
        "mse": float(np.mean((preds - trues) ** 2)),
    }
