#include "nevo/distrib/transport.hpp"

#include <vector>

#include "nevo/errors.hpp"

namespace nevo::distrib {

struct SimTransport::Hub {
    std::mutex mu;
    std::condition_variable cv;
    // (src, dst) -> FIFO; per-channel ordering is the map key
    std::map<std::pair<int, int>, std::deque<WireMessage>> queues;

    void push(int src, int dst, const WireMessage& m) {
        {
            std::lock_guard lock(mu);
            queues[{src, dst}].push_back(m);
        }
        cv.notify_all();
    }

    WireMessage pop(int dst, Millis timeout, bool any_src, int src, bool peers_only) {
        std::unique_lock lock(mu);
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            for (auto& [key, q] : queues) {
                if (key.second != dst || q.empty()) continue;
                if (!any_src && key.first != src) continue;
                if (peers_only && key.first == kCoordinator) continue;
                WireMessage m = std::move(q.front());
                q.pop_front();
                return m;
            }
            if (cv.wait_until(lock, deadline) == std::cv_status::timeout)
                throw RunError("sim transport: receive timeout at endpoint " +
                               std::to_string(dst));
        }
    }
};

class SimTransport::SimEndpoint : public Endpoint {
public:
    SimEndpoint(std::shared_ptr<Hub> hub, int id) : hub_(std::move(hub)), id_(id) {}

    void send(int dst, const WireMessage& m) override { hub_->push(id_, dst, m); }
    WireMessage recv(int src, Millis timeout) override {
        return hub_->pop(id_, timeout, false, src, false);
    }
    WireMessage recv_any(Millis timeout) override {
        return hub_->pop(id_, timeout, true, 0, false);
    }
    WireMessage recv_peer(Millis timeout) override {
        return hub_->pop(id_, timeout, true, 0, true);
    }

private:
    std::shared_ptr<Hub> hub_;
    int id_;
};

SimTransport::SimTransport(int n_workers) : hub_(std::make_shared<Hub>()) {
    coordinator_ = std::make_unique<SimEndpoint>(hub_, kCoordinator);
    for (int i = 0; i < n_workers; ++i)
        workers_.push_back(std::make_unique<SimEndpoint>(hub_, i));
}

SimTransport::~SimTransport() = default;

Endpoint& SimTransport::coordinator() {
    return *coordinator_;
}

Endpoint& SimTransport::worker(int i) {
    return *workers_.at(std::size_t(i));
}

void SimTransport::inject(int src, int dst, const WireMessage& m) {
    hub_->push(src, dst, m);
}

} // namespace nevo::distrib
