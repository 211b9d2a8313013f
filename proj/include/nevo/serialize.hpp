#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nevo/genome.hpp"
#include "nevo/network.hpp"

namespace nevo {

/// Little-endian byte sink for the internal binary frames.
class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(std::uint32_t(v)); }
    void f64(double v);
    void bytes(const std::vector<std::uint8_t>& b);
    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
    explicit ByteReader(const std::vector<std::uint8_t>& b) : ByteReader(b.data(), b.size()) {}
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int32_t i32() { return std::int32_t(u32()); }
    double f64();
    std::vector<std::uint8_t> bytes(std::size_t n);
    bool done() const { return pos_ == size_; }
    std::size_t remaining() const { return size_ - pos_; }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

/// Agent frame: versioned header plus length-prefixed sections (DCN topology,
/// DCN weights, DRN topology, DRN weights, static weights, genome). Weights
/// travel as raw IEEE-754 bit patterns, so decode(encode(x)) is bit-exact.
/// The network part is optional: rebuild-mode genome scatter sends only the
/// seed chain.
std::vector<std::uint8_t> encode_agent(const Genome& genome, const Network* net);

struct DecodedAgent {
    Genome genome;
    bool has_network = false;
    Network network;
};
DecodedAgent decode_agent(const std::vector<std::uint8_t>& frame);

std::vector<std::uint8_t> encode_network(const Network& net);
Network decode_network(const std::vector<std::uint8_t>& bytes);

} // namespace nevo
