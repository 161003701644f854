"""Deterministic Monte Carlo engine: streams, scheduling, aggregation, persistence.

Replica r always draws from its own counter-derived stream, so the result
of a run is a pure function of the spec: independent of worker count,
scheduling order, interruption and resume. Aggregation is a fold over
replica blocks merged in index order. Summaries serialize to a versioned
JSON document with an embedded checksum; the large per-checkpoint sample
arrays go to sidecar column files referenced by path and content hash.
"""

from __future__ import annotations

import hashlib
import json
import math
import multiprocessing
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _kernels
from .coeffs import coefficients
from .observables import (
    EmpiricalDistribution,
    TailEstimate,
    arcsine_cdf,
    arcsine_cdf_half,
    ks_distance,
    tail_estimate,
)

CODE_VERSION = "0.1.0"
SCHEMA_VERSION = 1
WORKERS_ENV_VAR = "ERWLAB_WORKERS"

_COLUMN_MAGIC = b"ERWF64\x00\x01"
_EMBED_STREAM_OFFSET = 2**32
_EXCURSION_STREAM_OFFSET = 2**33

# 20 uniform exponents on (0, 1]; t = 0 is omitted because the walk at
# n = 1 has no zeros yet and every checkpoint statistic degenerates there
DEFAULT_T_GRID = tuple(j / 20.0 for j in range(1, 21))


class ChecksumError(ValueError):
    """Summary file or sidecar content does not match its recorded hash."""


class SchemaMigrationError(ValueError):
    """Summary file was written under a different schema version."""


def derive_stream(master_seed: int, replica_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one replica.

    Counter-based: the (seed, index) pair is the key of a Philox generator,
    so derivation is pure and streams for distinct indices never overlap.
    """
    if not 0 <= master_seed < 2**64:
        raise ValueError(f"master_seed must fit in 64 bits, got {master_seed}")
    if not 0 <= replica_index < 2**64:
        raise ValueError(f"replica_index must fit in 64 bits, got {replica_index}")
    key = np.array([master_seed, replica_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class EnsembleSpec:
    """Complete, immutable description of one ensemble run.

    direct_walk drives the checkpoint statistics; embedding runs the
    exit-time chain to n_base and aggregates its clock diagnostics;
    excursion_check discretizes whole chains of excursion_steps steps and
    compares the qualifying-excursion count against the walk's zero count.
    """

    master_seed: int
    replicas: int
    p: float = 0.75
    q: float = 0.5
    n_base: int = 10_000
    t_grid: tuple[float, ...] = DEFAULT_T_GRID
    direct_walk: bool = True
    embedding: bool = False
    excursion_check: bool = False
    excursion_steps: int = 512
    excursion_refine: float = 256.0
    clock_thresholds: tuple[float, ...] = (0.5, 1.0)
    block_size: int = 1024
    spill_threshold: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "t_grid", tuple(float(t) for t in self.t_grid))
        object.__setattr__(
            self, "clock_thresholds", tuple(float(e) for e in self.clock_thresholds)
        )
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.replicas < 1:
            raise ValueError("need at least one replica")
        if self.replicas >= _EMBED_STREAM_OFFSET:
            raise ValueError("replica count collides with derived stream offsets")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.q <= 1.0):
            raise ValueError("p and q must be probabilities")
        if self.n_base < 2:
            raise ValueError("n_base must be at least 2")
        if not self.t_grid:
            raise ValueError("t_grid must be nonempty")
        if any(not 0.0 <= t <= 1.0 for t in self.t_grid):
            raise ValueError("t_grid must lie within [0, 1]")
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])):
            raise ValueError("t_grid must be strictly increasing")
        if self.embedding and (abs(self.p - 0.75) > 1e-12 or abs(self.q - 0.5) > 1e-12):
            raise ValueError("embedding runs require p = 3/4 and q = 1/2")
        if self.excursion_check and not 1 <= self.excursion_steps <= 4096:
            raise ValueError("excursion_steps must be in [1, 4096]")
        if self.excursion_check and not self.excursion_refine >= 64.0:
            raise ValueError("excursion_refine below 64 cannot resolve every interval")
        if not (self.direct_walk or self.embedding or self.excursion_check):
            raise ValueError("spec enables no work")
        if self.block_size < 1:
            raise ValueError("block_size must be positive")
        if self.spill_threshold < 1:
            raise ValueError("spill_threshold must be positive")

    def checkpoint_pairs(self) -> tuple[tuple[float, int], ...]:
        """(t, round(n_base^t)) pairs, deduplicated on n keeping the first t."""
        out: list[tuple[float, int]] = []
        for t in self.t_grid:
            n_t = int(round(self.n_base**t))
            if not out or n_t > out[-1][1]:
                out.append((t, n_t))
        return tuple(out)


@dataclass(frozen=True, eq=False)
class CheckpointSummary:
    """Aggregates at one checkpoint n: sorted sample columns of the three
    log statistics (normalized by log n), the censored-replica count, KS
    distances against the limiting laws, and the survival estimate."""

    t: float
    n: int
    z_values: np.ndarray
    g_values: np.ndarray
    ratio_values: np.ndarray
    censored: int
    ks_z: float
    ks_g: float
    tail: TailEstimate | None

    def __eq__(self, other):
        if not isinstance(other, CheckpointSummary):
            return NotImplemented
        return (
            self.t == other.t
            and self.n == other.n
            and np.array_equal(self.z_values, other.z_values)
            and np.array_equal(self.g_values, other.g_values)
            and np.array_equal(self.ratio_values, other.ratio_values)
            and self.censored == other.censored
            and _float_eq(self.ks_z, other.ks_z)
            and _float_eq(self.ks_g, other.ks_g)
            and self.tail == other.tail
        )


@dataclass(frozen=True, eq=False)
class EmbeddingSummary:
    """Clock diagnostics of the exit-time chain at horizon n, over replicas:
    moments of the drift (elapsed time minus the squared-coefficient sum),
    the mean of the compensated drift, exceedance frequencies of the running
    sup of |drift| against threshold * log n, the mean running sup of the
    squared compensated drift, and the sorted per-replica drift column."""

    n: int
    mean_drift: float
    var_drift: float
    mean_compensated: float
    sup_exceedance: dict[float, float]
    sup_compensated_sq_mean: float
    drift_values: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSummary):
            return NotImplemented
        return (
            self.n == other.n
            and _float_eq(self.mean_drift, other.mean_drift)
            and _float_eq(self.var_drift, other.var_drift)
            and _float_eq(self.mean_compensated, other.mean_compensated)
            and self.sup_exceedance == other.sup_exceedance
            and _float_eq(self.sup_compensated_sq_mean, other.sup_compensated_sq_mean)
            and np.array_equal(self.drift_values, other.drift_values)
        )


@dataclass(frozen=True)
class ExcursionSummary:
    """Whole-chain discretization check: how many replicas had the
    qualifying-excursion count equal the walk's zero count, plus the total
    number of zero-placement violations seen."""

    replicas: int
    steps: int
    refine: float
    matches: int
    bad_zeros: int

    @property
    def match_fraction(self) -> float:
        return self.matches / self.replicas


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """Everything a run produces; a pure function of its spec."""

    spec: EnsembleSpec
    checkpoints: tuple[CheckpointSummary, ...]
    embedding: EmbeddingSummary | None
    excursions: ExcursionSummary | None

    def __post_init__(self):
        for cp in self.checkpoints:
            if len(cp.z_values) + cp.censored != self.spec.replicas:
                raise ValueError(
                    f"checkpoint n={cp.n}: sample count {len(cp.z_values)} plus "
                    f"censored {cp.censored} does not equal replicas {self.spec.replicas}"
                )
            if len(cp.g_values) != len(cp.z_values):
                raise ValueError(f"checkpoint n={cp.n}: z and g sample counts differ")
            if len(cp.ratio_values) > len(cp.z_values):
                raise ValueError(f"checkpoint n={cp.n}: more ratios than samples")

    def __eq__(self, other):
        if not isinstance(other, EnsembleSummary):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.checkpoints == other.checkpoints
            and self.embedding == other.embedding
            and self.excursions == other.excursions
        )


def _float_eq(x: float, y: float) -> bool:
    return (x == y) or (math.isnan(x) and math.isnan(y))


@lru_cache(maxsize=4)
def _coefficient_arrays(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    c = coefficients(n_max)
    return c.a, c.a_sq_prefix


def _block_worker(spec: EnsembleSpec, start: int, stop: int, save_path: str | None):
    """Simulate replicas [start, stop) and return (or save) their raw rows."""
    out: dict[str, np.ndarray] = {}
    if spec.direct_walk:
        pairs = spec.checkpoint_pairs()
        cps = np.array([n for _, n in pairs], dtype=np.int64)
        spans = np.empty((stop - start, len(cps), 4), dtype=np.int64)
        drift = spec.p - 0.5
        for r in range(start, stop):
            spans[r - start] = _kernels.walk_spans(
                derive_stream(spec.master_seed, r), drift, spec.q, cps
            )
        out["spans"] = spans
    if spec.embedding:
        a, a_sq = _coefficient_arrays(spec.n_base + 1)
        horizon = np.array([spec.n_base], dtype=np.int64)
        rows = np.empty((stop - start, 6), dtype=np.float64)
        for r in range(start, stop):
            rows[r - start] = _kernels.embed_chain_checkpoints(
                derive_stream(spec.master_seed, _EMBED_STREAM_OFFSET + r),
                a,
                a_sq,
                horizon,
            )[0]
        out["embed"] = rows
    if spec.excursion_check:
        a, _ = _coefficient_arrays(spec.excursion_steps + 1)
        dt = float(a[spec.excursion_steps + 1]) ** 2 / spec.excursion_refine
        rows = np.empty((stop - start, 3), dtype=np.int64)
        for r in range(start, stop):
            gen = derive_stream(spec.master_seed, _EXCURSION_STREAM_OFFSET + r)
            vals, exit_idx, _, zeros = _kernels.chain_grid(
                gen, a, spec.excursion_steps, spec.excursion_refine
            )
            if len(exit_idx) < spec.excursion_steps:
                raise RuntimeError(f"replica {r}: grid node budget exhausted")
            count, bad = _kernels.count_qualifying(vals, exit_idx, a, dt)
            rows[r - start] = (count, zeros, bad)
        out["exc"] = rows
    if save_path is not None:
        tmp = save_path + ".tmp.npz"
        np.savez(tmp, **out)
        os.replace(tmp, save_path)
        return None
    return out


def _warm_kernels(spec: EnsembleSpec) -> None:
    # compile (or load from cache) before any fork, in the parent
    tiny = EnsembleSpec(
        master_seed=0,
        replicas=1,
        p=spec.p,
        q=spec.q,
        n_base=4,
        t_grid=(1.0,),
        direct_walk=spec.direct_walk,
        embedding=spec.embedding,
        excursion_check=spec.excursion_check,
        excursion_steps=4,
        excursion_refine=64.0,
    )
    _block_worker(tiny, 0, 1, None)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env is not None:
            workers = int(env)
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def run_ensemble(
    spec: EnsembleSpec,
    workers: int | None = None,
    checkpoint_dir: str | os.PathLike | None = None,
    resume: bool = False,
) -> EnsembleSummary:
    """Run the ensemble and fold the replica outputs into a summary.

    The summary depends only on the spec. With a checkpoint directory,
    completed blocks are saved as they finish and a resumed run reuses
    them; a worker failure aborts the run with the offending replica range
    while keeping the blocks already on disk.
    """
    workers = _resolve_workers(workers)
    if resume and checkpoint_dir is None:
        raise ValueError("resume requires a checkpoint directory")

    blocks = [
        (start, min(start + spec.block_size, spec.replicas))
        for start in range(0, spec.replicas, spec.block_size)
    ]

    ckpt = None
    if checkpoint_dir is not None:
        ckpt = Path(checkpoint_dir)
        ckpt.mkdir(parents=True, exist_ok=True)
        manifest_path = ckpt / "manifest.json"
        spec_hash = hashlib.sha256(_canonical_bytes(_spec_payload(spec))).hexdigest()
        if manifest_path.exists():
            recorded = json.loads(manifest_path.read_text())
            if recorded.get("spec_sha256") != spec_hash:
                raise ValueError(
                    "checkpoint directory was written by a different spec; refusing to mix blocks"
                )
        else:
            manifest_path.write_text(
                json.dumps(
                    {"spec_sha256": spec_hash, "schema_version": SCHEMA_VERSION},
                    sort_keys=True,
                )
            )

    def block_path(start: int, stop: int) -> Path | None:
        if ckpt is None:
            return None
        return ckpt / f"block_{start:09d}_{stop:09d}.npz"

    # spill: when block files exist anyway and the run is large, let workers
    # write results straight to disk instead of shipping arrays back
    n_cp = len(spec.checkpoint_pairs()) if spec.direct_walk else 0
    spill = ckpt is not None and spec.replicas * max(n_cp, 1) * 4 > spec.spill_threshold

    _warm_kernels(spec)

    results: dict[int, dict[str, np.ndarray] | None] = {}
    todo: list[tuple[int, int, int]] = []
    for bi, (start, stop) in enumerate(blocks):
        path = block_path(start, stop)
        if resume and path is not None and path.exists():
            results[bi] = None
            continue
        todo.append((bi, start, stop))

    def run_one(bi: int, start: int, stop: int):
        path = block_path(start, stop)
        save = str(path) if (path is not None and spill) else None
        data = _block_worker(spec, start, stop, save)
        if path is not None and not spill:
            tmp = str(path) + ".tmp.npz"
            np.savez(tmp, **data)
            os.replace(tmp, path)
        return data if not spill else None

    if workers == 1 or len(todo) <= 1:
        for bi, start, stop in todo:
            try:
                results[bi] = run_one(bi, start, stop)
            except Exception as exc:
                raise RuntimeError(
                    f"replicas [{start}, {stop}) failed: {exc}; completed blocks kept"
                ) from exc
    else:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            futures = {}
            for bi, start, stop in todo:
                path = block_path(start, stop)
                save = str(path) if (path is not None and spill) else None
                fut = pool.submit(_block_worker, spec, start, stop, save)
                futures[fut] = (bi, start, stop, path)
            for fut, (bi, start, stop, path) in futures.items():
                try:
                    data = fut.result()
                except Exception as exc:
                    raise RuntimeError(
                        f"replicas [{start}, {stop}) failed: {exc}; completed blocks kept"
                    ) from exc
                if path is not None and not spill and data is not None:
                    tmp = str(path) + ".tmp.npz"
                    np.savez(tmp, **data)
                    os.replace(tmp, path)
                results[bi] = data if not spill else None

    def block_data(bi: int) -> dict[str, np.ndarray]:
        data = results.get(bi)
        if data is not None:
            return data
        start, stop = blocks[bi]
        path = block_path(start, stop)
        assert path is not None
        with np.load(path, allow_pickle=False) as z:
            return {k: z[k] for k in z.files}

    return _aggregate(spec, [block_data(bi) for bi in range(len(blocks))])


def _aggregate(spec: EnsembleSpec, block_rows: list[dict[str, np.ndarray]]) -> EnsembleSummary:
    checkpoints: tuple[CheckpointSummary, ...] = ()
    embedding = None
    excursions = None

    if spec.direct_walk:
        spans = np.concatenate([b["spans"] for b in block_rows], axis=0)
        pairs = spec.checkpoint_pairs()
        cps = []
        for ci, (t, n_cp) in enumerate(pairs):
            cps.append(
                _summarize_checkpoint(
                    t, n_cp, spans[:, ci, 1], spans[:, ci, 2], spec.replicas
                )
            )
        checkpoints = tuple(cps)

    if spec.embedding:
        rows = np.concatenate([b["embed"] for b in block_rows], axis=0)
        _, a_sq = _coefficient_arrays(spec.n_base + 1)
        drift = rows[:, 1] - float(a_sq[spec.n_base])
        compensated = rows[:, 3]
        sup_sq = rows[:, 4]
        sup_ta = rows[:, 5]
        scale = math.log(spec.n_base)
        exceed = {
            float(eps): float(np.mean(sup_ta >= eps * scale))
            for eps in spec.clock_thresholds
        }
        embedding = EmbeddingSummary(
            n=spec.n_base,
            mean_drift=float(np.mean(drift)),
            var_drift=float(np.var(drift)),
            mean_compensated=float(np.mean(compensated)),
            sup_exceedance=exceed,
            sup_compensated_sq_mean=float(np.mean(sup_sq)),
            drift_values=np.sort(drift),
        )

    if spec.excursion_check:
        rows = np.concatenate([b["exc"] for b in block_rows], axis=0)
        excursions = ExcursionSummary(
            replicas=spec.replicas,
            steps=spec.excursion_steps,
            refine=spec.excursion_refine,
            matches=int(np.sum(rows[:, 0] == rows[:, 1])),
            bad_zeros=int(np.sum(rows[:, 2])),
        )

    return EnsembleSummary(
        spec=spec, checkpoints=checkpoints, embedding=embedding, excursions=excursions
    )


def _summarize_checkpoint(
    t: float, n_cp: int, z: np.ndarray, g: np.ndarray, replicas: int
) -> CheckpointSummary:
    kept = z > 0
    censored = int(replicas - np.count_nonzero(kept))
    if n_cp >= 2:
        log_n = math.log(n_cp)
        z_vals = np.sort(np.log(z[kept].astype(np.float64)) / log_n)
        g_vals = np.sort(np.log(g[kept].astype(np.float64)) / log_n)
    else:
        z_vals = np.empty(0, dtype=np.float64)
        g_vals = np.empty(0, dtype=np.float64)
    rmask = (z > 1) & (g > 1)
    ratio_vals = np.sort(
        np.log(z[rmask].astype(np.float64)) / np.log(g[rmask].astype(np.float64))
    )
    if len(z_vals):
        # zero-count law conditional on a return; last-zero law keeps the
        # censored replicas as bottom mass below the support
        ks_z = ks_distance(EmpiricalDistribution(z_vals), arcsine_cdf_half)
        ks_g = ks_distance(
            EmpiricalDistribution(g_vals, censored_below=censored), arcsine_cdf
        )
    else:
        ks_z = math.nan
        ks_g = math.nan
    tail = tail_estimate(censored, replicas, n_cp) if n_cp >= 2 else None
    return CheckpointSummary(
        t=t,
        n=n_cp,
        z_values=z_vals,
        g_values=g_vals,
        ratio_values=ratio_vals,
        censored=censored,
        ks_z=ks_z,
        ks_g=ks_g,
        tail=tail,
    )


# ---------------------------------------------------------------------------
# persistence

def _canonical_bytes(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def _spec_payload(spec: EnsembleSpec) -> dict:
    return {
        "provenance": {
            "seed": spec.master_seed,
            "replicas": spec.replicas,
            "p": spec.p,
            "q": spec.q,
            "n_base": spec.n_base,
            "t_grid": list(spec.t_grid),
            "code_version": CODE_VERSION,
            "schema_version": SCHEMA_VERSION,
        },
        "spec_extra": {
            "direct_walk": spec.direct_walk,
            "embedding": spec.embedding,
            "excursion_check": spec.excursion_check,
            "excursion_steps": spec.excursion_steps,
            "excursion_refine": spec.excursion_refine,
            "clock_thresholds": list(spec.clock_thresholds),
            "block_size": spec.block_size,
            "spill_threshold": spec.spill_threshold,
        },
    }


def _num(x: float):
    return None if math.isnan(x) else x


def _nan(x) -> float:
    return math.nan if x is None else float(x)


def _write_column(path: Path, values: np.ndarray) -> dict:
    data = np.ascontiguousarray(values, dtype="<f8").tobytes()
    blob = _COLUMN_MAGIC + struct.pack("<Q", len(values)) + data
    path.write_bytes(blob)
    return {
        "path": path.name,
        "sha256": hashlib.sha256(blob).hexdigest(),
        "count": int(len(values)),
    }


def _read_column(directory: Path, ref: dict) -> np.ndarray:
    path = directory / ref["path"]
    blob = path.read_bytes()
    if hashlib.sha256(blob).hexdigest() != ref["sha256"]:
        raise ChecksumError(f"sidecar {ref['path']} does not match its recorded hash")
    if blob[:8] != _COLUMN_MAGIC:
        raise ChecksumError(f"sidecar {ref['path']} has a foreign magic header")
    (count,) = struct.unpack("<Q", blob[8:16])
    if count != ref["count"] or len(blob) != 16 + 8 * count:
        raise ChecksumError(f"sidecar {ref['path']} length disagrees with its header")
    return np.frombuffer(blob[16:], dtype="<f8").copy()


def persist_summary(summary: EnsembleSummary, path: str | os.PathLike) -> Path:
    """Write the summary document plus its sample sidecars; returns the path."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    stem = out.stem
    payload = _spec_payload(summary.spec)

    per_cp = []
    for ci, cp in enumerate(summary.checkpoints):
        entry = {
            "t": cp.t,
            "n": cp.n,
            "z_ecdf_ref": _write_column(
                out.parent / f"{stem}_cp{ci:02d}_z.f64", cp.z_values
            ),
            "g_ecdf_ref": _write_column(
                out.parent / f"{stem}_cp{ci:02d}_g.f64", cp.g_values
            ),
            "ratio_ecdf_ref": _write_column(
                out.parent / f"{stem}_cp{ci:02d}_ratio.f64", cp.ratio_values
            ),
            "censored": cp.censored,
            "ks_z": _num(cp.ks_z),
            "ks_g": _num(cp.ks_g),
            "tail": None
            if cp.tail is None
            else {
                "p_hat": cp.tail.p_hat,
                "ci_low": cp.tail.ci_low,
                "ci_high": cp.tail.ci_high,
                "theory": cp.tail.theory,
            },
        }
        per_cp.append(entry)
    payload["per_checkpoint"] = per_cp

    if summary.embedding is None:
        payload["embedding"] = None
    else:
        emb = summary.embedding
        payload["embedding"] = {
            "n": emb.n,
            "mean_T_minus_A": emb.mean_drift,
            "var_T_minus_A": emb.var_drift,
            "prop42_freq": {repr(k): v for k, v in emb.sup_exceedance.items()},
            "mean_compensated": emb.mean_compensated,
            "sup_compensated_sq_mean": emb.sup_compensated_sq_mean,
            "t_minus_a_ref": _write_column(
                out.parent / f"{stem}_t_minus_a.f64", emb.drift_values
            ),
        }

    if summary.excursions is None:
        payload["excursions"] = None
    else:
        exc = summary.excursions
        payload["excursions"] = {
            "replicas": exc.replicas,
            "steps": exc.steps,
            "refine": exc.refine,
            "matches": exc.matches,
            "bad_zeros": exc.bad_zeros,
        }

    payload["checksum"] = hashlib.sha256(_canonical_bytes(payload)).hexdigest()
    out.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return out


def load_summary(path: str | os.PathLike) -> EnsembleSummary:
    """Read a summary document back; verifies schema, checksum, and sidecars."""
    src = Path(path)
    try:
        payload = json.loads(src.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ChecksumError(f"summary file {src} is not parseable: {exc}") from exc

    recorded_schema = payload.get("provenance", {}).get("schema_version")
    if recorded_schema != SCHEMA_VERSION:
        raise SchemaMigrationError(
            f"summary schema version {recorded_schema} needs migration to {SCHEMA_VERSION}"
        )
    recorded_sum = payload.pop("checksum", None)
    if recorded_sum != hashlib.sha256(_canonical_bytes(payload)).hexdigest():
        raise ChecksumError(f"summary file {src} fails its embedded checksum")

    prov = payload["provenance"]
    extra = payload["spec_extra"]
    spec = EnsembleSpec(
        master_seed=prov["seed"],
        replicas=prov["replicas"],
        p=prov["p"],
        q=prov["q"],
        n_base=prov["n_base"],
        t_grid=tuple(prov["t_grid"]),
        direct_walk=extra["direct_walk"],
        embedding=extra["embedding"],
        excursion_check=extra["excursion_check"],
        excursion_steps=extra["excursion_steps"],
        excursion_refine=extra["excursion_refine"],
        clock_thresholds=tuple(extra["clock_thresholds"]),
        block_size=extra["block_size"],
        spill_threshold=extra["spill_threshold"],
    )

    cps = []
    for entry in payload["per_checkpoint"]:
        tail = entry["tail"]
        cps.append(
            CheckpointSummary(
                t=entry["t"],
                n=entry["n"],
                z_values=_read_column(src.parent, entry["z_ecdf_ref"]),
                g_values=_read_column(src.parent, entry["g_ecdf_ref"]),
                ratio_values=_read_column(src.parent, entry["ratio_ecdf_ref"]),
                censored=entry["censored"],
                ks_z=_nan(entry["ks_z"]),
                ks_g=_nan(entry["ks_g"]),
                tail=None
                if tail is None
                else TailEstimate(
                    n=entry["n"],
                    p_hat=tail["p_hat"],
                    ci_low=tail["ci_low"],
                    ci_high=tail["ci_high"],
                    theory=tail["theory"],
                ),
            )
        )

    embedding = None
    if payload["embedding"] is not None:
        emb = payload["embedding"]
        embedding = EmbeddingSummary(
            n=emb["n"],
            mean_drift=emb["mean_T_minus_A"],
            var_drift=emb["var_T_minus_A"],
            mean_compensated=emb["mean_compensated"],
            sup_exceedance={float(k): v for k, v in emb["prop42_freq"].items()},
            sup_compensated_sq_mean=emb["sup_compensated_sq_mean"],
            drift_values=_read_column(src.parent, emb["t_minus_a_ref"]),
        )

    excursions = None
    if payload["excursions"] is not None:
        exc = payload["excursions"]
        excursions = ExcursionSummary(
            replicas=exc["replicas"],
            steps=exc["steps"],
            refine=exc["refine"],
            matches=exc["matches"],
            bad_zeros=exc["bad_zeros"],
        )

    return EnsembleSummary(
        spec=spec, checkpoints=tuple(cps), embedding=embedding, excursions=excursions
    )
