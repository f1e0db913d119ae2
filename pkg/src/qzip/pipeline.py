"""Experiment runners: one function per CLI mode, each returning a Report."""

from __future__ import annotations

import numpy as np

from .config import ExperimentConfig
from .diag import run_theorem1
from .linalg import shannon_entropy, von_neumann_entropy
from .lz import LZDecodeError, condense, expand_retained, lz_decode, lz_encode, rate_statistics
from .report import Report
from .search import (
    analytic_search,
    build_mesh,
    empirical_search,
    entropy_gap_bound,
    phase_reduced_distance,
    reduce_basis,
)
from .source import effective_source, sample_block, symbols_to_bits
from .truncation import (
    BlockModel,
    SmearConfig,
    analytic_error,
    analytic_fidelity,
    simulate_truncation,
)


def _symbol_width(d: int) -> int:
    return 1 if d == 2 else int(np.ceil(np.log2(d)))


def _stderr(x) -> float | None:
    x = np.asarray(x, dtype=float)
    return float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else None


def _mu(config: ExperimentConfig) -> np.ndarray:
    return effective_source(config.source.density_matrix(), config.computational_basis()).mu


def run_rate(config: ExperimentConfig) -> Report:
    """Asymptotic condensation rate in the configured frame and the LZ rate at each block length."""
    rho = config.source.density_matrix()
    src = effective_source(rho, config.computational_basis())
    d = config.source.dimension
    rows = []
    for i, n in enumerate(config.n_values or (config.n,)):
        # bits per d-ary signal, including the fixed-width pre-coding
        st = rate_statistics(src.mu, n, config.trials, (config.seed, i))
        rows.append([n, st.trials, st.mean_rate, None if np.isnan(st.stderr) else st.stderr])
    summary = {
        "von_neumann_entropy": von_neumann_entropy(rho),
        "effective_distribution": src.mu.tolist(),
        "condensation_rate": shannon_entropy(src.mu),
        "bits_per_symbol": _symbol_width(d),
    }
    return Report("rate", config.to_dict(), summary, ["n", "trials", "mean_rate", "stderr"], rows)


def run_lz(config: ExperimentConfig) -> Report:
    """LZ rate curve over `n_values`, with a round-trip check on every sampled block."""
    mu = _mu(config)
    d = config.source.dimension
    rows = []
    failures = 0
    for i, n in enumerate(config.n_values or (config.n,)):
        rates = []
        for ss in np.random.SeedSequence((config.seed, i)).spawn(config.trials):
            bits = symbols_to_bits(sample_block(mu, n, ss), d)
            code = lz_encode(bits)
            failures += int(not np.array_equal(lz_decode(code), bits))
            rates.append(code.shape[0] / n)
        rows.append([n, config.trials, float(np.mean(rates)), _stderr(rates)])
    summary = {
        "entropy": shannon_entropy(mu),
        "effective_distribution": mu.tolist(),
        "round_trip_failures": failures,
    }
    return Report("lz", config.to_dict(), summary, ["n", "trials", "mean_rate", "stderr"], rows)


def run_theorem1_mode(config: ExperimentConfig) -> Report:
    rep = run_theorem1(config.source.dimension, config.positions, config.trials, config.seed)
    return Report("theorem1", config.to_dict(), rep.to_dict())


def truncation_rows(n: int, Y: int, L: int, trials: int, seed, k: int | None = None) -> list[list]:
    """Analytic vs Monte Carlo truncation statistics, one row per boundary offset K.

    With `k` given there is one row for K = k mod L; otherwise every K in
    [0, L) is placed at a boundary near the middle of the block.
    """
    config = SmearConfig(Y, n, L)
    if k is None:
        base = max(L, (n // 2) // L * L)
        ks = [base + K for K in range(L)]
    else:
        ks = [k]
    rows = []
    for i, kk in enumerate(ks):
        run = simulate_truncation(BlockModel(n, kk), config, trials, (seed, i))
        st = run.summary()
        K = kk % L
        rows.append([K, kk, float(analytic_fidelity(K, Y, L)), st.mean_fidelity, st.stderr_fidelity,
                     float(analytic_error(K, Y, L)), st.error_rate, st.stderr_error,
                     st.max_width, trials])
    return rows


TRUNCATION_COLUMNS = ["K", "k", "analytic_F", "empirical_F", "stderr_F",
                      "analytic_Pe", "empirical_Pe", "stderr_Pe", "interval_width", "trials"]


def run_truncate_sim(config: ExperimentConfig) -> Report:
    rows = truncation_rows(config.n, config.Y, config.step, config.trials, config.seed, config.k)
    summary = {
        "fidelity_lower_bound": 1 - 2 / config.Y,
        "error_upper_bound": 1 / config.Y,
        "boundary_uncertainty": config.step + config.Y,
    }
    return Report("truncate-sim", config.to_dict(), summary, TRUNCATION_COLUMNS, rows)


def run_search(config: ExperimentConfig) -> Report:
    """Analytic and empirical minimum-rate search over a qubit mesh."""
    if config.source.dimension != 2:
        raise ValueError("basis search is implemented for qubit sources only")
    rho = config.source.density_matrix()
    truth = config.source.eigenbasis()
    mesh = build_mesh(2, config.delta)
    analytic = analytic_search(rho, mesh)
    smear = SmearConfig(config.Y, config.n, config.L)
    empirical = empirical_search(rho, mesh, config.n, smear, config.trials, config.seed)

    summary = empirical.to_dict()
    del summary["rate_table"]  # carried by the table
    summary["distance_to_eigenbasis"] = phase_reduced_distance(empirical.basis_estimate, truth)
    summary["von_neumann_entropy"] = von_neumann_entropy(rho)
    summary["mesh_size"] = len(mesh)
    summary["mesh_spacing"] = config.delta
    summary["entropy_gap_bound"] = entropy_gap_bound(config.delta)
    summary["analytic"] = {
        "best_index": analytic.best_index,
        "best_rate": analytic.best_rate,
        "basis_estimate": list(reduce_basis(analytic.basis_estimate)),
        "distance_to_eigenbasis": phase_reduced_distance(analytic.basis_estimate, truth),
    }
    rows = [[i, float(mesh.angles[i, 0]), float(mesh.angles[i, 1]), a, e]
            for (i, a), (_, e) in zip(analytic.rate_table, empirical.rate_table)]
    return Report("search", config.to_dict(), summary,
                  ["index", "theta", "phi", "analytic_rate", "empirical_rate"], rows)


def run_pipeline(config: ExperimentConfig) -> Report:
    """Sample, condense, truncate and decode blocks; report rate and recovery.

    Each sampled block is one computational-basis branch, so its boundary
    is definite: the truncation run on it decides how many bits are kept,
    and the kept prefix is decoded and compared with the original. The
    fidelity and error rate come from a second run on the idealized model
    whose data region is maximally mixed up to the same boundary.
    """
    mu = _mu(config)
    d = config.source.dimension
    nbits = config.n * _symbol_width(d)
    smear = SmearConfig(config.Y, nbits, config.L)

    data_len = np.empty(config.trials)
    kept = np.empty(config.trials)
    fidelity = np.empty(config.trials)
    error = np.zeros(config.trials, bool)
    recovered = np.zeros(config.trials, bool)
    for t, ss in enumerate(np.random.SeedSequence(config.seed).spawn(config.trials)):
        block_seed, branch_seed, model_seed = ss.spawn(3)
        bits = symbols_to_bits(sample_block(mu, config.n, block_seed), d)
        block = condense(bits)
        k = block.data_bits.shape[0]
        branch = simulate_truncation(BlockModel(nbits, k, left_base=np.inf), smear, 1, branch_seed)
        model = simulate_truncation(BlockModel(nbits, k), smear, 1, model_seed)
        hi = int(branch.hi[0])
        data_len[t] = k
        kept[t] = hi
        fidelity[t] = model.fidelity[0]
        error[t] = model.error[0]
        try:
            recovered[t] = np.array_equal(expand_retained(block.to_bits()[:hi], block.raw), bits)
        except LZDecodeError:
            recovered[t] = False

    rho = config.source.density_matrix()
    summary = {
        "trials": config.trials,
        "von_neumann_entropy": von_neumann_entropy(rho),
        "effective_entropy": shannon_entropy(mu),
        "condensation_rate": float(data_len.mean() / config.n),
        "condensation_rate_stderr": _stderr(data_len / config.n),
        "qubits_per_signal": float(kept.mean() / config.n),
        "qubits_per_signal_stderr": _stderr(kept / config.n),
        "retained_length": float(kept.mean()),
        "recovered_fraction": float(recovered.mean()),
        "recovered_fraction_stderr": _stderr(recovered),
        "mean_fidelity": float(fidelity.mean()),
        "mean_fidelity_stderr": _stderr(fidelity),
        "error_rate": float(error.mean()),
        "error_rate_stderr": _stderr(error),
        "fidelity_lower_bound": 1 - 2 / config.Y,
        "boundary_uncertainty": smear.L + smear.Y,
    }
    rows = [[t, int(data_len[t]), int(kept[t]), float(fidelity[t]), bool(error[t]), bool(recovered[t])]
            for t in range(config.trials)]
    return Report("pipeline", config.to_dict(), summary,
                  ["trial", "data_bits", "retained_bits", "fidelity", "error", "recovered"], rows)


RUNNERS = {
    "rate": run_rate,
    "lz": run_lz,
    "theorem1": run_theorem1_mode,
    "truncate-sim": run_truncate_sim,
    "search": run_search,
    "pipeline": run_pipeline,
}


def run(config: ExperimentConfig, mode: str | None = None) -> Report:
    return RUNNERS[mode or config.mode](config)
