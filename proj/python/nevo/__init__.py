"""Neuroevolution of dynamically-complexifying networks.

Thin python surface over the C++ core: seed-chain genomes, dynamic
recurrent/convolutional networks, score and adversarial-imitation evolution,
and the rebuild/peer-to-peer communication benchmark.
"""

from ._nevo import (  # noqa: F401
    AdvRow,
    AdvRunLog,
    BenchRow,
    BenchTable,
    CartPole,
    ConfigError,
    ContractError,
    DotChase,
    Genome,
    Network,
    RngStream,
    RunError,
    ScoreRow,
    ScoreRunLog,
    Selection,
    StepResult,
    Trajectory,
    TrajectoryDataset,
    TrajectoryStep,
    action_select,
    bench_comm,
    derive_stream,
    evolve_adversarial,
    evolve_score,
    expert_policy,
    initial_network,
    read_genome_file,
    read_trajectories_file,
    record_expert,
    replay,
    truncation_select,
    variation_step,
    write_genome_file,
    write_trajectories_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
