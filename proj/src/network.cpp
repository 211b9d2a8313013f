#include "nevo/network.hpp"

#include "nevo/errors.hpp"

namespace nevo {

Network initial_network(const InitDescriptor& desc) {
    desc.validate();
    RngStream rng = derive_stream(descriptor_seed(desc), kLabelInit);
    switch (desc.kind) {
        case GenomeKind::drn_only:
            return DrnGraph(desc.n_in, desc.n_out, rng);
        case GenomeKind::composite:
            return CompositeNet(desc.image.c, desc.image.h, desc.image.w, desc.n_out, rng,
                                desc.fixed_inputs);
        case GenomeKind::static_mlp:
            if (desc.pixel)
                return StaticNet(desc.image, desc.fixed_inputs, desc.widths[1], desc.n_out,
                                 desc.recurrent, rng);
            return StaticNet(desc.widths, desc.recurrent, rng);
    }
    throw ConfigError("initial_network: unknown genome kind");
}

namespace {

// drn-only agents pick among the four DRN mutations, resampling among the
// applicable ones when the first draw cannot fire.
MutationRecord mutate_drn_only(DrnGraph& g, RngStream& choice, RngStream& structural) {
    auto applicable = [&](MutationKind k) {
        switch (k) {
            case MutationKind::drn_grow_connection: return g.can_grow_connection();
            case MutationKind::drn_prune_connection: return g.can_prune_connection();
            case MutationKind::drn_grow_node: return g.can_grow_node();
            case MutationKind::drn_prune_node: return g.can_prune_node();
            default: return false;
        }
    };
    auto apply = [&](MutationKind k) {
        switch (k) {
            case MutationKind::drn_grow_connection: return g.grow_connection(structural).applied;
            case MutationKind::drn_prune_connection: return g.prune_connection(structural).applied;
            case MutationKind::drn_grow_node: return g.grow_node(structural).applied;
            case MutationKind::drn_prune_node: return g.prune_node(structural).applied;
            default: return false;
        }
    };
    MutationRecord rec;
    auto k = MutationKind(choice.uniform_int(4));
    if (!applicable(k)) {
        rec.resampled = true;
        std::vector<MutationKind> pool;
        for (int i = 0; i < 4; ++i)
            if (applicable(MutationKind(i))) pool.push_back(MutationKind(i));
        if (pool.empty()) throw ContractError("drn mutate: no applicable mutation");
        k = pool[choice.uniform_int(pool.size())];
    }
    rec.applied = k;
    if (!apply(k)) throw ContractError("drn mutate: applicable mutation failed");
    return rec;
}

} // namespace

std::optional<MutationRecord> apply_variation(Network& net, Seed seed) {
    RngStream choice = derive_stream(seed, kLabelMutationChoice);
    RngStream structural = derive_stream(seed, kLabelStructural);
    RngStream perturbation = derive_stream(seed, kLabelPerturbation);

    std::optional<MutationRecord> rec;
    if (auto* drn = std::get_if<DrnGraph>(&net)) {
        rec = mutate_drn_only(*drn, choice, structural);
        drn->perturb_weights(perturbation);
    } else if (auto* comp = std::get_if<CompositeNet>(&net)) {
        rec = comp->mutate(choice, structural);
        comp->perturb_weights(perturbation);
    } else {
        std::get<StaticNet>(net).perturb_weights(perturbation);
    }
    return rec;
}

std::optional<MutationRecord> variation_step(Genome& genome, Network& net, Seed seed) {
    genome.seeds.push_back(seed);
    return apply_variation(net, seed);
}

Network replay(const Genome& genome) {
    Network net = initial_network(genome.init);
    for (Seed s : genome.seeds) apply_variation(net, s);
    return net;
}

std::vector<double> network_forward(Network& net, std::span<const double> x) {
    return std::visit([&](auto& n) { return n.forward(x); }, net);
}

void network_reset_state(Network& net) {
    std::visit([](auto& n) { n.reset_state(); }, net);
}

std::size_t network_node_count(const Network& net) {
    if (const auto* drn = std::get_if<DrnGraph>(&net)) return drn->node_count();
    if (const auto* comp = std::get_if<CompositeNet>(&net)) return comp->node_count();
    const auto& s = std::get<StaticNet>(net);
    return std::size_t(s.input_width()) + s.hidden_width() + s.output_width();
}

std::size_t network_connection_count(const Network& net) {
    if (const auto* drn = std::get_if<DrnGraph>(&net)) return drn->connection_count();
    if (const auto* comp = std::get_if<CompositeNet>(&net)) return comp->connection_count();
    return std::get<StaticNet>(net).parameter_count();
}

bool network_equal(const Network& a, const Network& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            return x == std::get<T>(b);
        },
        a);
}

} // namespace nevo
