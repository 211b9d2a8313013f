#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nevo/rng.hpp"

namespace nevo::distrib {

enum class MsgTag : std::uint8_t {
    seed_scatter = 1,
    fitness_report = 2,
    selection_verdict = 3,
    agent_transfer = 4,
    match_order = 5,
    shutdown = 6,
};

const char* tag_name(MsgTag t);

/// Tagged protocol message. Every message carries its generation number;
/// receivers drop messages from generations they have already passed.
/// Only the fields of the active tag are meaningful.
struct WireMessage {
    MsgTag tag = MsgTag::shutdown;
    std::uint64_t generation = 0;

    // seed_scatter: the worker's variation seed plus the episode seed shared
    // by the whole generation.
    Seed seed = 0;
    Seed episode_seed = 0;

    // fitness_report (worker id + fitness, plus the instrumentation the
    // coordinator aggregates into generation reports)
    std::int32_t worker = -1;
    double fitness = 0.0;
    std::uint64_t variation_ops = 0;
    double variation_ms = 0.0;
    double comm_ms = 0.0;
    double nodes = 0.0;
    double connections = 0.0;
    double genome_len = 0.0;

    // selection_verdict: partner is the transfer destination for selected
    // workers and the expected sender for unselected ones. partner_endpoint
    // is only used by the socket transport.
    bool selected = false;
    std::int32_t partner = -1;
    std::string partner_endpoint;

    // match_order
    std::uint8_t role = 0; // 0 generator, 1 discriminator
    std::uint64_t real_index = 0;

    // agent_transfer
    std::vector<std::uint8_t> payload;

    bool operator==(const WireMessage&) const = default;
};

/// Socket payload: 1-byte tag + fields. The transport prepends the 4-byte
/// big-endian length.
std::vector<std::uint8_t> encode_message(const WireMessage& m);
WireMessage decode_message(const std::vector<std::uint8_t>& bytes);

} // namespace nevo::distrib
