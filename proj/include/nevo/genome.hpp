#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nevo/rng.hpp"
#include "nevo/tensor.hpp"

namespace nevo {

enum class GenomeKind : std::uint8_t { drn_only, composite, static_mlp };

/// Everything needed to build an agent's initial network. The descriptor must
/// fully determine the network: replaying a genome starts from it alone.
struct InitDescriptor {
    GenomeKind kind = GenomeKind::drn_only;

    // drn_only: n_in/n_out. composite and pixel statics: image + n_out.
    int n_in = 0;
    int n_out = 0;
    Shape image;

    // fixed scalar inputs fed alongside the image (discriminator action one-hot)
    int fixed_inputs = 0;

    // static_mlp
    std::vector<int> widths; // {in, hidden, out} for the scalar variant
    bool pixel = false;
    bool recurrent = false;

    /// Comma-separated text form used in genome files, e.g. "4,2",
    /// "1,8,8,5,f2", "4,32,2,r", "conv,1,8,8,64,5,r".
    std::string to_string() const;
    static InitDescriptor from_string(GenomeKind kind, const std::string& text);

    void validate() const;
    bool operator==(const InitDescriptor&) const = default;
};

/// Seed-chain genome: the initial-network descriptor plus one seed per
/// variation stage survived. Replaying the chain deterministically rebuilds
/// the agent's exact network.
struct Genome {
    InitDescriptor init;
    std::vector<Seed> seeds;

    GenomeKind kind() const { return init.kind; }
    bool operator==(const Genome&) const = default;
};

// NEVO-GENOME v1 text format; write-then-read is the identity.
void write_genome(std::ostream& os, const Genome& g);
Genome read_genome(std::istream& is);
void write_genome_file(const std::string& path, const Genome& g);
Genome read_genome_file(const std::string& path);

/// Deterministic seed folded from the descriptor fields; the initial network
/// draws its weights from this stream so an empty genome replays identically
/// everywhere.
Seed descriptor_seed(const InitDescriptor& d);

} // namespace nevo
