#pragma once

#include <optional>
#include <span>
#include <variant>

#include "nevo/composite.hpp"
#include "nevo/genome.hpp"
#include "nevo/static_net.hpp"

namespace nevo {

using Network = std::variant<DrnGraph, CompositeNet, StaticNet>;

/// The network an empty genome replays to. Deterministic: initial weights are
/// drawn from a stream derived from the descriptor itself, so every agent of
/// a run starts identical and replay needs nothing but the genome.
Network initial_network(const InitDescriptor& desc);

/// One variation stage: exactly one structural mutation (picked uniformly
/// among the network kind's applicable mutations; static nets have none)
/// followed by N(0, 0.01) perturbation of every weight and bias. All draws
/// come from labeled sub-streams of `seed`, so the seed alone reproduces the
/// stage.
std::optional<MutationRecord> apply_variation(Network& net, Seed seed);

/// Appends the seed to the genome and applies the variation stage to the
/// network kept alongside it.
std::optional<MutationRecord> variation_step(Genome& genome, Network& net, Seed seed);

/// Rebuilds the network from scratch: initial_network + one variation stage
/// per seed, in order.
Network replay(const Genome& genome);

std::vector<double> network_forward(Network& net, std::span<const double> x);
void network_reset_state(Network& net);
std::size_t network_node_count(const Network& net);
std::size_t network_connection_count(const Network& net);
bool network_equal(const Network& a, const Network& b);

} // namespace nevo
