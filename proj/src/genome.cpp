#include "nevo/genome.hpp"

#include <fstream>
#include <sstream>

#include "nevo/errors.hpp"
#include "nevo/io_util.hpp"

namespace nevo {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("descriptor: expected integer, got '" + s + "'");
    }
    if (pos != s.size()) throw ConfigError("descriptor: trailing junk in '" + s + "'");
    return v;
}

const char* kind_name(GenomeKind k) {
    switch (k) {
        case GenomeKind::drn_only: return "drn";
        case GenomeKind::composite: return "composite";
        case GenomeKind::static_mlp: return "static";
    }
    return "?";
}

GenomeKind kind_from_name(const std::string& s) {
    if (s == "drn") return GenomeKind::drn_only;
    if (s == "composite") return GenomeKind::composite;
    if (s == "static") return GenomeKind::static_mlp;
    throw ConfigError("genome: unknown kind '" + s + "'");
}

} // namespace

std::string InitDescriptor::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case GenomeKind::drn_only:
            os << n_in << ',' << n_out;
            break;
        case GenomeKind::composite:
            os << image.c << ',' << image.h << ',' << image.w << ',' << n_out;
            if (fixed_inputs > 0) os << ",f" << fixed_inputs;
            break;
        case GenomeKind::static_mlp:
            if (pixel) {
                os << "conv," << image.c << ',' << image.h << ',' << image.w << ','
                   << widths.at(1) << ',' << n_out;
                if (fixed_inputs > 0) os << ",f" << fixed_inputs;
            } else {
                os << widths.at(0) << ',' << widths.at(1) << ',' << widths.at(2);
            }
            if (recurrent) os << ",r";
            break;
    }
    return os.str();
}

InitDescriptor InitDescriptor::from_string(GenomeKind kind, const std::string& text) {
    InitDescriptor d;
    d.kind = kind;
    auto parts = split(text, ',');
    auto take_flag = [&](const std::string& flag) {
        if (!parts.empty() && parts.back() == flag) {
            parts.pop_back();
            return true;
        }
        return false;
    };
    auto take_fixed = [&]() {
        if (!parts.empty() && parts.back().size() > 1 && parts.back()[0] == 'f') {
            const int k = parse_int(parts.back().substr(1));
            parts.pop_back();
            return k;
        }
        return 0;
    };
    switch (kind) {
        case GenomeKind::drn_only:
            if (parts.size() != 2) throw ConfigError("drn descriptor: want n_in,n_out");
            d.n_in = parse_int(parts[0]);
            d.n_out = parse_int(parts[1]);
            break;
        case GenomeKind::composite:
            d.fixed_inputs = take_fixed();
            if (parts.size() != 4) throw ConfigError("composite descriptor: want c,h,w,n_out");
            d.image = {parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2])};
            d.n_out = parse_int(parts[3]);
            break;
        case GenomeKind::static_mlp:
            d.recurrent = take_flag("r");
            if (!parts.empty() && parts[0] == "conv") {
                d.pixel = true;
                d.fixed_inputs = take_fixed();
                if (parts.size() != 6)
                    throw ConfigError("static conv descriptor: want conv,c,h,w,hidden,out");
                d.image = {parse_int(parts[1]), parse_int(parts[2]), parse_int(parts[3])};
                const int hidden = parse_int(parts[4]);
                d.n_out = parse_int(parts[5]);
                d.widths = {0, hidden, d.n_out};
            } else {
                if (parts.size() != 3) throw ConfigError("static descriptor: want in,hidden,out");
                d.widths = {parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2])};
                d.n_out = d.widths[2];
            }
            break;
    }
    d.validate();
    return d;
}

void InitDescriptor::validate() const {
    switch (kind) {
        case GenomeKind::drn_only:
            if (n_in < 0 || n_out < 1) throw ConfigError("drn descriptor: need n_in >= 0, n_out >= 1");
            break;
        case GenomeKind::composite:
            if (image.c < 1 || image.h < 1 || image.w < 1 || n_out < 1 || fixed_inputs < 0)
                throw ConfigError("composite descriptor: bad dimensions");
            break;
        case GenomeKind::static_mlp:
            if (widths.size() != 3) throw ConfigError("static descriptor: want three widths");
            if (pixel) {
                if (image.c < 1 || image.h < 1 || image.w < 1)
                    throw ConfigError("static conv descriptor: bad image shape");
            } else if (widths[0] < 1) {
                throw ConfigError("static descriptor: bad input width");
            }
            if (widths[1] < 1 || widths[2] < 1)
                throw ConfigError("static descriptor: bad widths");
            break;
    }
}

void write_genome(std::ostream& os, const Genome& g) {
    os << "NEVO-GENOME v1\n";
    os << "kind=" << kind_name(g.init.kind) << "\n";
    os << "init=" << g.init.to_string() << "\n";
    for (Seed s : g.seeds) os << s << "\n";
}

Genome read_genome(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "NEVO-GENOME v1")
        throw ConfigError("genome: bad or missing header");
    if (!std::getline(is, line) || line.rfind("kind=", 0) != 0)
        throw ConfigError("genome: missing kind line");
    const GenomeKind kind = kind_from_name(line.substr(5));
    if (!std::getline(is, line) || line.rfind("init=", 0) != 0)
        throw ConfigError("genome: missing init line");
    Genome g;
    g.init = InitDescriptor::from_string(kind, line.substr(5));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(line, &pos);
        } catch (const std::exception&) {
            throw ConfigError("genome: bad seed line '" + line + "'");
        }
        if (pos != line.size()) throw ConfigError("genome: bad seed line '" + line + "'");
        g.seeds.push_back(v);
    }
    return g;
}

void write_genome_file(const std::string& path, const Genome& g) {
    std::ostringstream os;
    write_genome(os, g);
    write_file_atomic(path, os.str());
}

Genome read_genome_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("genome: cannot open '" + path + "'");
    return read_genome(is);
}

Seed descriptor_seed(const InitDescriptor& d) {
    auto mix = [](Seed h, std::uint64_t v) {
        h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return h;
    };
    Seed h = 0x6e65766f2d696e69ull; // arbitrary fixed basis
    h = mix(h, std::uint64_t(d.kind));
    h = mix(h, std::uint64_t(std::uint32_t(d.n_in)));
    h = mix(h, std::uint64_t(std::uint32_t(d.n_out)));
    h = mix(h, std::uint64_t(std::uint32_t(d.image.c)));
    h = mix(h, std::uint64_t(std::uint32_t(d.image.h)));
    h = mix(h, std::uint64_t(std::uint32_t(d.image.w)));
    h = mix(h, std::uint64_t(std::uint32_t(d.fixed_inputs)));
    for (int w : d.widths) h = mix(h, std::uint64_t(std::uint32_t(w)));
    h = mix(h, d.pixel ? 1 : 0);
    h = mix(h, d.recurrent ? 1 : 0);
    return h;
}

} // namespace nevo
