#include "nevo/distrib/wire.hpp"

#include "nevo/errors.hpp"
#include "nevo/serialize.hpp"

namespace nevo::distrib {

const char* tag_name(MsgTag t) {
    switch (t) {
        case MsgTag::seed_scatter: return "seed_scatter";
        case MsgTag::fitness_report: return "fitness_report";
        case MsgTag::selection_verdict: return "selection_verdict";
        case MsgTag::agent_transfer: return "agent_transfer";
        case MsgTag::match_order: return "match_order";
        case MsgTag::shutdown: return "shutdown";
    }
    return "?";
}

std::vector<std::uint8_t> encode_message(const WireMessage& m) {
    ByteWriter w;
    w.u8(std::uint8_t(m.tag));
    w.u64(m.generation);
    switch (m.tag) {
        case MsgTag::seed_scatter:
            w.u64(m.seed);
            w.u64(m.episode_seed);
            break;
        case MsgTag::fitness_report:
            w.i32(m.worker);
            w.f64(m.fitness);
            w.u64(m.variation_ops);
            w.f64(m.variation_ms);
            w.f64(m.comm_ms);
            w.f64(m.nodes);
            w.f64(m.connections);
            w.f64(m.genome_len);
            break;
        case MsgTag::selection_verdict:
            w.u8(m.selected ? 1 : 0);
            w.i32(m.partner);
            w.u32(std::uint32_t(m.partner_endpoint.size()));
            for (char c : m.partner_endpoint) w.u8(std::uint8_t(c));
            break;
        case MsgTag::agent_transfer:
            w.u32(std::uint32_t(m.payload.size()));
            w.bytes(m.payload);
            break;
        case MsgTag::match_order:
            w.u8(m.role);
            w.i32(m.partner);
            w.u64(m.real_index);
            break;
        case MsgTag::shutdown:
            break;
    }
    return w.take();
}

WireMessage decode_message(const std::vector<std::uint8_t>& bytes) {
    ByteReader r(bytes);
    WireMessage m;
    m.tag = MsgTag(r.u8());
    m.generation = r.u64();
    switch (m.tag) {
        case MsgTag::seed_scatter:
            m.seed = r.u64();
            m.episode_seed = r.u64();
            break;
        case MsgTag::fitness_report:
            m.worker = r.i32();
            m.fitness = r.f64();
            m.variation_ops = r.u64();
            m.variation_ms = r.f64();
            m.comm_ms = r.f64();
            m.nodes = r.f64();
            m.connections = r.f64();
            m.genome_len = r.f64();
            break;
        case MsgTag::selection_verdict: {
            m.selected = r.u8() != 0;
            m.partner = r.i32();
            const auto len = r.u32();
            for (std::uint32_t i = 0; i < len; ++i) m.partner_endpoint += char(r.u8());
            break;
        }
        case MsgTag::agent_transfer:
            m.payload = r.bytes(r.u32());
            break;
        case MsgTag::match_order:
            m.role = r.u8();
            m.partner = r.i32();
            m.real_index = r.u64();
            break;
        case MsgTag::shutdown:
            break;
        default:
            throw RunError("wire: unknown message tag");
    }
    if (!r.done()) throw RunError("wire: trailing bytes in message");
    return m;
}

} // namespace nevo::distrib
