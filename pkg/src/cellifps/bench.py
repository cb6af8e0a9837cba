"""Wall-clock comparison of the two samplers on the 1024/512 input pyramid."""

from __future__ import annotations

import os
import statistics
import time
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .core import PointCloud
from .dataio import generate_shape, write_text_atomic
from .sampling import STAGE_SIZES, CellIfpsConfig, multiscale_sample

DEFAULT_SIZES = (2048, 4048, 6048, 8048, 10048)
ALGORITHMS = ("ifps", "cell_ifps")
STAGES = ("sampling", "generation_stub", "total")
CSV_HEADER = "algorithm,stage,n_input,repeat,wall_ms"

Algorithm = Literal["ifps", "cell_ifps"]
Stage = Literal["sampling", "generation_stub", "total"]


@dataclass(frozen=True)
class BenchRecord:
    algorithm: Algorithm
    stage: Stage
    n_input: int
    wall_ms: float
    repeat_index: int
    t_start_ns: int = 0


@dataclass(frozen=True)
class SummaryRow:
    n_input: int
    ifps_ms: float
    cell_ifps_ms: float
    speedup: float


def speedup(t_p: float, t_ip: float) -> float:
    """How many times faster ``t_ip`` is than ``t_p``."""
    if not (t_p > 0 and t_ip > 0):
        raise ValueError(f"times must be positive, got {t_p} and {t_ip}")
    return t_p / t_ip


def _generation_stub(clouds) -> None:
    # Placeholder for network inference, which is not reproduced here.
    return None


def _timed_run(cloud: PointCloud, algorithm: str, config: CellIfpsConfig) -> tuple[int, int, int]:
    fresh = PointCloud._trusted(cloud.xyz.copy())
    t0 = time.perf_counter_ns()
    pyramid = multiscale_sample(fresh, config, sampler=algorithm)
    t1 = time.perf_counter_ns()
    _generation_stub(pyramid)
    t2 = time.perf_counter_ns()
    return t0, t1, t2


def run_sampling_bench(
    sizes: Sequence[int] = DEFAULT_SIZES,
    repeats: int = 5,
    rng_seed: int = 0,
    config: CellIfpsConfig | None = None,
) -> list[BenchRecord]:
    """Time ``multiscale_sample`` with each sampler on a vehicle-proxy cloud per size.

    Every (size, sampler) pair gets one discarded warm-up run, then
    ``repeats`` timed runs. Each repeat sweeps all sizes, and the samplers
    swap order between repeats, so slow drift in machine speed is shared
    across sizes and samplers alike.
    """
    if os.environ.get("PYTEST_XDIST_WORKER"):
        raise RuntimeError("refusing to benchmark under parallel test workers")
    if repeats < 3:
        raise ValueError(f"repeats must be >= 3, got {repeats}")
    sizes = [int(s) for s in sizes]
    for n in sizes:
        if n < STAGE_SIZES[0]:
            raise ValueError(f"input size {n} below minimum scale {STAGE_SIZES[0]}")
    config = config or CellIfpsConfig(rng_seed=rng_seed)

    clouds = {n: generate_shape("vehicle_proxy", n, rng_seed) for n in sizes}
    for n in sizes:
        for alg in ALGORITHMS:
            _timed_run(clouds[n], alg, config)
    records: list[BenchRecord] = []
    for r in range(repeats):
        order = ALGORITHMS if r % 2 == 0 else ALGORITHMS[::-1]
        for n in sizes:
            for alg in order:
                t0, t1, t2 = _timed_run(clouds[n], alg, config)
                for stage, ns, start in (
                    ("sampling", t1 - t0, t0),
                    ("generation_stub", t2 - t1, t1),
                    ("total", t2 - t0, t0),
                ):
                    records.append(BenchRecord(alg, stage, n, ns / 1e6, r, start))
    return records


def medians(records: Iterable[BenchRecord], stage: Stage = "sampling") -> dict[tuple[str, int], float]:
    """Median wall time per (algorithm, n_input) for one stage."""
    groups: dict[tuple[str, int], list[float]] = {}
    for rec in records:
        if rec.stage == stage:
            groups.setdefault((rec.algorithm, rec.n_input), []).append(rec.wall_ms)
    return {k: statistics.median(v) for k, v in groups.items()}


def summarize(records: Iterable[BenchRecord]) -> list[SummaryRow]:
    """Per input size, median sampling times and the cell_ifps speedup over ifps."""
    med = medians(records)
    rows = []
    for n in sorted({n for _, n in med}):
        if ("ifps", n) in med and ("cell_ifps", n) in med:
            a, b = med["ifps", n], med["cell_ifps", n]
            rows.append(SummaryRow(n, a, b, speedup(a, b) if a > 0 and b > 0 else float("nan")))
    return rows


def format_summary(rows: Sequence[SummaryRow]) -> str:
    lines = ["n_input,ifps_median_ms,cell_ifps_median_ms,speedup"]
    lines += [f"{r.n_input},{r.ifps_ms:.6f},{r.cell_ifps_ms:.6f},{r.speedup:.3f}" for r in rows]
    return "\n".join(lines) + "\n"


def format_report(records: Sequence[BenchRecord]) -> str:
    """CSV of every record, then the summary as ``#`` comment lines."""
    lines = [CSV_HEADER]
    lines += [f"{r.algorithm},{r.stage},{r.n_input},{r.repeat_index},{r.wall_ms:.6f}" for r in records]
    text = "\n".join(lines) + "\n"
    if records:
        text += "# summary: median sampling wall_ms per size\n"
        text += "".join(f"# {line}\n" for line in format_summary(summarize(records)).splitlines())
    return text


def emit_report(records: Sequence[BenchRecord], path) -> None:
    write_text_atomic(path, format_report(records))
