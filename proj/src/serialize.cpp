#include "nevo/serialize.hpp"

#include <bit>
#include <cstring>

#include "nevo/errors.hpp"

namespace nevo {

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(std::uint8_t(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(std::uint8_t(v >> (8 * i)));
}

void ByteWriter::f64(double v) {
    u64(std::bit_cast<std::uint64_t>(v));
}

void ByteWriter::bytes(const std::vector<std::uint8_t>& b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
}

std::uint8_t ByteReader::u8() {
    if (pos_ + 1 > size_) throw RunError("frame underrun");
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    if (pos_ + 4 > size_) throw RunError("frame underrun");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(data_[pos_++]) << (8 * i);
    return v;
}

std::uint64_t ByteReader::u64() {
    if (pos_ + 8 > size_) throw RunError("frame underrun");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(data_[pos_++]) << (8 * i);
    return v;
}

double ByteReader::f64() {
    return std::bit_cast<double>(u64());
}

std::vector<std::uint8_t> ByteReader::bytes(std::size_t n) {
    if (pos_ + n > size_) throw RunError("frame underrun");
    std::vector<std::uint8_t> out(data_ + pos_, data_ + pos_ + n);
    pos_ += n;
    return out;
}

// ---------------------------------------------------------------------------

struct DrnAccess {
    static void write_topology(ByteWriter& w, const DrnGraph& g) {
        auto seg = [&](const std::vector<DrnNode>& nodes) {
            w.u32(std::uint32_t(nodes.size()));
            for (const auto& n : nodes) {
                w.i32(n.id);
                w.u8(std::uint8_t(n.role));
            }
        };
        seg(g.inputs_);
        seg(g.hidden_);
        seg(g.outputs_);
        w.u32(std::uint32_t(g.connections_.size()));
        for (const auto& c : g.connections_) {
            w.i32(c.id);
            w.i32(c.src);
            w.i32(c.dst);
            w.u8(std::uint8_t(c.phase));
        }
        w.i32(g.next_node_id_);
        w.i32(g.next_conn_id_);
    }
    static void write_weights(ByteWriter& w, const DrnGraph& g) {
        auto seg = [&](const std::vector<DrnNode>& nodes) {
            for (const auto& n : nodes) {
                w.f64(n.bias);
                w.f64(n.state);
            }
        };
        seg(g.inputs_);
        seg(g.hidden_);
        seg(g.outputs_);
        for (const auto& c : g.connections_) w.f64(c.weight);
    }
    static DrnGraph read(ByteReader& topo, ByteReader& weights) {
        DrnGraph g;
        auto seg = [&](std::vector<DrnNode>& nodes) {
            const auto n = topo.u32();
            nodes.resize(n);
            for (auto& node : nodes) {
                node.id = topo.i32();
                node.role = NodeRole(topo.u8());
            }
        };
        seg(g.inputs_);
        seg(g.hidden_);
        seg(g.outputs_);
        const auto nc = topo.u32();
        g.connections_.resize(nc);
        for (auto& c : g.connections_) {
            c.id = topo.i32();
            c.src = topo.i32();
            c.dst = topo.i32();
            c.phase = Phase(topo.u8());
        }
        g.next_node_id_ = topo.i32();
        g.next_conn_id_ = topo.i32();
        auto wseg = [&](std::vector<DrnNode>& nodes) {
            for (auto& node : nodes) {
                node.bias = weights.f64();
                node.state = weights.f64();
            }
        };
        wseg(g.inputs_);
        wseg(g.hidden_);
        wseg(g.outputs_);
        for (auto& c : g.connections_) c.weight = weights.f64();
        return g;
    }
};

struct DcnAccess {
    static void write_topology(ByteWriter& w, const DcnTree& t) {
        w.u32(std::uint32_t(t.nodes_.size()));
        for (const auto& n : t.nodes_) {
            w.i32(n.id);
            w.u8(std::uint8_t(n.kind));
            w.i32(n.parent);
            w.u32(std::uint32_t(n.children.size()));
            for (int c : n.children) w.i32(c);
            w.i32(n.in_channels);
            w.i32(n.out_channels);
            w.i32(n.pool_factor);
            w.i32(n.out_shape.c);
            w.i32(n.out_shape.h);
            w.i32(n.out_shape.w);
        }
        w.i32(t.root_id_);
        w.i32(t.next_id_);
    }
    static void write_weights(ByteWriter& w, const DcnTree& t) {
        for (const auto& n : t.nodes_) {
            w.u32(std::uint32_t(n.kernel.size()));
            for (double v : n.kernel) w.f64(v);
            w.u32(std::uint32_t(n.bias.size()));
            for (double v : n.bias) w.f64(v);
        }
    }
    static DcnTree read(ByteReader& topo, ByteReader& weights) {
        DcnTree t;
        const auto n = topo.u32();
        t.nodes_.resize(n);
        for (auto& node : t.nodes_) {
            node.id = topo.i32();
            node.kind = DcnKind(topo.u8());
            node.parent = topo.i32();
            node.children.resize(topo.u32());
            for (auto& c : node.children) c = topo.i32();
            node.in_channels = topo.i32();
            node.out_channels = topo.i32();
            node.pool_factor = topo.i32();
            node.out_shape.c = topo.i32();
            node.out_shape.h = topo.i32();
            node.out_shape.w = topo.i32();
        }
        t.root_id_ = topo.i32();
        t.next_id_ = topo.i32();
        for (auto& node : t.nodes_) {
            node.kernel.resize(weights.u32());
            for (auto& v : node.kernel) v = weights.f64();
            node.bias.resize(weights.u32());
            for (auto& v : node.bias) v = weights.f64();
        }
        return t;
    }
};

struct CompositeAccess {
    static void write(ByteWriter& dcn_topo, ByteWriter& dcn_weights, ByteWriter& drn_topo,
                      ByteWriter& drn_weights, const CompositeNet& c) {
        DcnAccess::write_topology(dcn_topo, c.dcn_);
        DcnAccess::write_weights(dcn_weights, c.dcn_);
        DrnAccess::write_topology(drn_topo, c.drn_);
        DrnAccess::write_weights(drn_weights, c.drn_);
        dcn_topo.i32(c.fixed_inputs_);
        dcn_topo.u32(std::uint32_t(c.leaf_map_.size()));
        for (const auto& [leaf, input] : c.leaf_map_) {
            dcn_topo.i32(leaf);
            dcn_topo.i32(input);
        }
    }
    static CompositeNet read(ByteReader& dcn_topo, ByteReader& dcn_weights, ByteReader& drn_topo,
                             ByteReader& drn_weights) {
        CompositeNet c;
        c.dcn_ = DcnAccess::read(dcn_topo, dcn_weights);
        c.drn_ = DrnAccess::read(drn_topo, drn_weights);
        c.fixed_inputs_ = dcn_topo.i32();
        const auto n = dcn_topo.u32();
        c.leaf_map_.resize(n);
        for (auto& [leaf, input] : c.leaf_map_) {
            leaf = dcn_topo.i32();
            input = dcn_topo.i32();
        }
        return c;
    }
};

namespace {

constexpr std::uint32_t kMagic = 0x4F56454E; // "NEVO"
constexpr std::uint16_t kVersion = 1;

enum NetTag : std::uint8_t { net_none = 0, net_drn = 1, net_composite = 2, net_static = 3 };

void write_section(ByteWriter& out, const ByteWriter& section) {
    out.u32(std::uint32_t(section.data().size()));
    out.bytes(section.data());
}

std::vector<std::uint8_t> read_section(ByteReader& in) {
    const auto len = in.u32();
    return in.bytes(len);
}

void write_static(ByteWriter& w, const StaticNet& s) {
    for (double v : s.parameters()) w.f64(v);
    for (double v : s.hidden_state()) w.f64(v);
}

StaticNet read_static(const InitDescriptor& desc, ByteReader& r) {
    // topology comes from the descriptor; only parameters travel
    Network net = initial_network(desc);
    StaticNet s = std::get<StaticNet>(net);
    for (auto& v : s.parameters()) v = r.f64();
    std::vector<double> state(s.hidden_state().size());
    for (auto& v : state) v = r.f64();
    s.set_hidden_state(std::move(state));
    return s;
}

void write_genome_section(ByteWriter& w, const Genome& g) {
    const std::string init = g.init.to_string();
    w.u8(std::uint8_t(g.init.kind));
    w.u32(std::uint32_t(init.size()));
    for (char c : init) w.u8(std::uint8_t(c));
    w.u32(std::uint32_t(g.seeds.size()));
    for (Seed s : g.seeds) w.u64(s);
}

Genome read_genome_section(ByteReader& r) {
    Genome g;
    const auto kind = GenomeKind(r.u8());
    const auto len = r.u32();
    std::string init;
    for (std::uint32_t i = 0; i < len; ++i) init += char(r.u8());
    g.init = InitDescriptor::from_string(kind, init);
    g.seeds.resize(r.u32());
    for (auto& s : g.seeds) s = r.u64();
    return g;
}

} // namespace

std::vector<std::uint8_t> encode_agent(const Genome& genome, const Network* net) {
    ByteWriter header, dcn_topo, dcn_weights, drn_topo, drn_weights, stat, gen;

    header.u32(kMagic);
    header.u32(kVersion);
    std::uint8_t tag = net_none;
    if (net) {
        if (std::holds_alternative<DrnGraph>(*net)) tag = net_drn;
        else if (std::holds_alternative<CompositeNet>(*net)) tag = net_composite;
        else tag = net_static;
    }
    header.u8(tag);

    if (net) {
        if (const auto* d = std::get_if<DrnGraph>(net)) {
            DrnAccess::write_topology(drn_topo, *d);
            DrnAccess::write_weights(drn_weights, *d);
        } else if (const auto* c = std::get_if<CompositeNet>(net)) {
            CompositeAccess::write(dcn_topo, dcn_weights, drn_topo, drn_weights, *c);
        } else {
            write_static(stat, std::get<StaticNet>(*net));
        }
    }
    write_genome_section(gen, genome);

    ByteWriter frame;
    write_section(frame, header);
    write_section(frame, dcn_topo);
    write_section(frame, dcn_weights);
    write_section(frame, drn_topo);
    write_section(frame, drn_weights);
    write_section(frame, stat);
    write_section(frame, gen);
    return frame.take();
}

DecodedAgent decode_agent(const std::vector<std::uint8_t>& frame) {
    ByteReader r(frame);
    const auto header_b = read_section(r);
    const auto dcn_topo_b = read_section(r);
    const auto dcn_weights_b = read_section(r);
    const auto drn_topo_b = read_section(r);
    const auto drn_weights_b = read_section(r);
    const auto stat_b = read_section(r);
    const auto gen_b = read_section(r);

    ByteReader header(header_b);
    if (header.u32() != kMagic) throw RunError("agent frame: bad magic");
    if (header.u32() != kVersion) throw RunError("agent frame: unsupported version");
    const auto tag = header.u8();

    DecodedAgent out;
    ByteReader gen(gen_b);
    out.genome = read_genome_section(gen);

    if (tag == net_none) return out;
    out.has_network = true;
    if (tag == net_drn) {
        ByteReader topo(drn_topo_b), weights(drn_weights_b);
        out.network = DrnAccess::read(topo, weights);
    } else if (tag == net_composite) {
        ByteReader dcn_topo(dcn_topo_b), dcn_weights(dcn_weights_b);
        ByteReader drn_topo(drn_topo_b), drn_weights(drn_weights_b);
        out.network = CompositeAccess::read(dcn_topo, dcn_weights, drn_topo, drn_weights);
    } else if (tag == net_static) {
        ByteReader stat(stat_b);
        out.network = read_static(out.genome.init, stat);
    } else {
        throw RunError("agent frame: unknown network tag");
    }
    return out;
}

std::vector<std::uint8_t> encode_network(const Network& net) {
    Genome g; // descriptor-only genome so static topology can be rebuilt
    g.init.n_out = 1; // placeholder descriptor; ignored for graph networks
    if (const auto* s = std::get_if<StaticNet>(&net)) {
        g.init.kind = GenomeKind::static_mlp;
        g.init.pixel = s->pixel();
        g.init.recurrent = s->recurrent();
        g.init.image = s->input_shape();
        g.init.fixed_inputs = s->fixed_inputs();
        g.init.widths = {s->pixel() ? 0 : s->input_width(), s->hidden_width(), s->output_width()};
        g.init.n_out = s->output_width();
    }
    return encode_agent(g, &net);
}

Network decode_network(const std::vector<std::uint8_t>& bytes) {
    auto decoded = decode_agent(bytes);
    if (!decoded.has_network) throw RunError("frame carries no network");
    return std::move(decoded.network);
}

} // namespace nevo
