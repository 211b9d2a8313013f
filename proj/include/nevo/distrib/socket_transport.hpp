#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nevo/distrib/transport.hpp"

namespace nevo::distrib {

/// TCP framing shared by both socket endpoints: 4-byte big-endian length,
/// then the 1-byte message tag and payload from encode_message.
void send_frame(int fd, const std::vector<std::uint8_t>& body);
std::vector<std::uint8_t> recv_frame(int fd, Millis timeout);

/// Coordinator side of the socket transport: accepts `n_workers` loopback
/// connections, assigns worker ids in accept order and records each worker's
/// peer-listening address for selection verdicts.
class SocketCoordinator : public Endpoint {
public:
    explicit SocketCoordinator(int n_workers, std::uint16_t port = 0);
    ~SocketCoordinator() override;

    std::uint16_t port() const { return port_; }
    /// Blocks until every worker has connected and completed its handshake.
    void accept_workers(Millis timeout = kDefaultTimeout);

    void send(int dst, const WireMessage& m) override;
    WireMessage recv(int src, Millis timeout) override;
    WireMessage recv_any(Millis timeout) override;
    WireMessage recv_peer(Millis timeout) override;
    std::string worker_endpoint(int worker) const override;

private:
    int n_workers_;
    std::uint16_t port_ = 0;
    int listen_fd_ = -1;
    std::vector<int> worker_fd_;
    std::vector<std::string> worker_addr_;
};

/// Worker side: connects to the coordinator, opens its own listening socket
/// for peer-to-peer agent transfers and learns its id from the handshake.
class SocketWorker : public Endpoint {
public:
    explicit SocketWorker(const std::string& coordinator_host, std::uint16_t coordinator_port);
    ~SocketWorker() override;

    int assigned_id() const { return id_; }

    void send(int dst, const WireMessage& m) override;
    WireMessage recv(int src, Millis timeout) override;
    WireMessage recv_any(Millis timeout) override;
    WireMessage recv_peer(Millis timeout) override;
    void register_peer(int id, const std::string& endpoint) override;

private:
    int id_ = -1;
    int coordinator_fd_ = -1;
    int listen_fd_ = -1;
    std::uint16_t listen_port_ = 0;
    std::map<int, std::string> peer_addr_;
};

} // namespace nevo::distrib
