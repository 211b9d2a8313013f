#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "nevo/distrib/wire.hpp"

namespace nevo::distrib {

constexpr int kCoordinator = -1;
using Millis = std::chrono::milliseconds;
constexpr Millis kDefaultTimeout{30000};

/// One side of the message fabric. Endpoints are numbered: -1 is the
/// coordinator, workers count from 0. Delivery is reliable and ordered per
/// (source, destination) channel.
class Endpoint {
public:
    virtual ~Endpoint() = default;

    virtual void send(int dst, const WireMessage& m) = 0;
    /// Blocks for a message from `src`; throws RunError on timeout.
    virtual WireMessage recv(int src, Millis timeout = kDefaultTimeout) = 0;
    /// Blocks for a message from any source (coordinator gather).
    virtual WireMessage recv_any(Millis timeout = kDefaultTimeout) = 0;
    /// Blocks for a message from any worker peer (unselected side of a
    /// transfer).
    virtual WireMessage recv_peer(Millis timeout = kDefaultTimeout) = 0;

    /// Address registration used by the socket transport before sending to a
    /// peer; the simulated transport needs none.
    virtual void register_peer(int /*id*/, const std::string& /*endpoint*/) {}
    /// Printable address of a connected worker (socket transport); empty for
    /// the simulated transport.
    virtual std::string worker_endpoint(int /*worker*/) const { return {}; }
};

/// All roles in one process: per-channel FIFO queues under one lock, so the
/// whole protocol runs without networking.
class SimTransport {
public:
    explicit SimTransport(int n_workers);
    ~SimTransport();

    Endpoint& coordinator();
    Endpoint& worker(int i);

    /// Test hook: enqueue a message on the (src, dst) channel directly.
    void inject(int src, int dst, const WireMessage& m);

private:
    struct Hub;
    class SimEndpoint;
    std::shared_ptr<Hub> hub_;
    std::unique_ptr<SimEndpoint> coordinator_;
    std::vector<std::unique_ptr<SimEndpoint>> workers_;
};

} // namespace nevo::distrib
