#include "nevo/distrib/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "nevo/errors.hpp"

namespace nevo::distrib {

namespace {

// transport-private handshake tags, outside the WireMessage tag range
constexpr std::uint8_t kHelloFromWorker = 0xFF;
constexpr std::uint8_t kHelloReply = 0xFE;

void close_fd(int& fd) {
    if (fd >= 0) {
        ::close(fd);
        fd = -1;
    }
}

void wait_readable(int fd, Millis timeout, const char* what) {
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, int(timeout.count()));
    if (rc == 0) throw RunError(std::string("socket transport: timeout waiting for ") + what);
    if (rc < 0) throw RunError(std::string("socket transport: poll failed for ") + what);
}

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
        const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n <= 0) throw RunError("socket transport: send failed");
        data += n;
        len -= std::size_t(n);
    }
}

void read_all(int fd, std::uint8_t* data, std::size_t len, Millis timeout) {
    while (len > 0) {
        wait_readable(fd, timeout, "frame bytes");
        const ssize_t n = ::recv(fd, data, len, 0);
        if (n <= 0) throw RunError("socket transport: connection closed mid-frame");
        data += n;
        len -= std::size_t(n);
    }
}

int make_listener(std::uint16_t port, std::uint16_t* bound_port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw RunError("socket transport: cannot create socket");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
        throw RunError("socket transport: bind failed");
    if (::listen(fd, 64) != 0) throw RunError("socket transport: listen failed");
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    *bound_port = ntohs(addr.sin_port);
    return fd;
}

int connect_to(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw RunError("socket transport: cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw RunError("socket transport: bad address '" + host + "'");
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw RunError("socket transport: connect to " + host + ":" + std::to_string(port) +
                       " failed");
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return fd;
}

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& endpoint) {
    const auto colon = endpoint.rfind(':');
    if (colon == std::string::npos)
        throw RunError("socket transport: endpoint '" + endpoint + "' lacks a port");
    return {endpoint.substr(0, colon), std::uint16_t(std::stoi(endpoint.substr(colon + 1)))};
}

} // namespace

void send_frame(int fd, const std::vector<std::uint8_t>& body) {
    std::uint8_t len[4] = {
        std::uint8_t(body.size() >> 24), std::uint8_t(body.size() >> 16),
        std::uint8_t(body.size() >> 8), std::uint8_t(body.size())};
    write_all(fd, len, 4);
    write_all(fd, body.data(), body.size());
}

std::vector<std::uint8_t> recv_frame(int fd, Millis timeout) {
    std::uint8_t len[4];
    read_all(fd, len, 4, timeout);
    const std::size_t n = (std::size_t(len[0]) << 24) | (std::size_t(len[1]) << 16) |
                          (std::size_t(len[2]) << 8) | std::size_t(len[3]);
    std::vector<std::uint8_t> body(n);
    read_all(fd, body.data(), n, timeout);
    return body;
}

// --------------------------------------------------------------------------- coordinator

SocketCoordinator::SocketCoordinator(int n_workers, std::uint16_t port) : n_workers_(n_workers) {
    listen_fd_ = make_listener(port, &port_);
}

SocketCoordinator::~SocketCoordinator() {
    for (int& fd : worker_fd_) close_fd(fd);
    close_fd(listen_fd_);
}

void SocketCoordinator::accept_workers(Millis timeout) {
    worker_fd_.resize(n_workers_, -1);
    worker_addr_.resize(n_workers_);
    for (int i = 0; i < n_workers_; ++i) {
        wait_readable(listen_fd_, timeout, "worker connection");
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) throw RunError("socket transport: accept failed");
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        worker_fd_[i] = fd;

        const auto hello = recv_frame(fd, timeout);
        if (hello.size() != 5 || hello[0] != kHelloFromWorker)
            throw RunError("socket transport: bad worker hello");
        const std::uint32_t peer_port = std::uint32_t(hello[1]) | (std::uint32_t(hello[2]) << 8) |
                                        (std::uint32_t(hello[3]) << 16) |
                                        (std::uint32_t(hello[4]) << 24);
        worker_addr_[i] = "127.0.0.1:" + std::to_string(peer_port);

        std::vector<std::uint8_t> reply = {kHelloReply, std::uint8_t(i), std::uint8_t(i >> 8),
                                           std::uint8_t(i >> 16), std::uint8_t(i >> 24)};
        send_frame(fd, reply);
    }
}

void SocketCoordinator::send(int dst, const WireMessage& m) {
    send_frame(worker_fd_.at(std::size_t(dst)), encode_message(m));
}

WireMessage SocketCoordinator::recv(int src, Millis timeout) {
    return decode_message(recv_frame(worker_fd_.at(std::size_t(src)), timeout));
}

WireMessage SocketCoordinator::recv_any(Millis timeout) {
    std::vector<pollfd> fds;
    for (int fd : worker_fd_) fds.push_back({fd, POLLIN, 0});
    const int rc = ::poll(fds.data(), fds.size(), int(timeout.count()));
    if (rc == 0) throw RunError("socket transport: gather timeout");
    if (rc < 0) throw RunError("socket transport: poll failed in gather");
    for (std::size_t i = 0; i < fds.size(); ++i)
        if (fds[i].revents & (POLLIN | POLLHUP))
            return decode_message(recv_frame(worker_fd_[i], timeout));
    throw RunError("socket transport: poll returned without readable fd");
}

WireMessage SocketCoordinator::recv_peer(Millis) {
    throw RunError("socket transport: coordinator has no peer channel");
}

std::string SocketCoordinator::worker_endpoint(int worker) const {
    return worker_addr_.at(std::size_t(worker));
}

// --------------------------------------------------------------------------- worker

SocketWorker::SocketWorker(const std::string& host, std::uint16_t port) {
    listen_fd_ = make_listener(0, &listen_port_);
    coordinator_fd_ = connect_to(host, port);

    std::vector<std::uint8_t> hello = {kHelloFromWorker, std::uint8_t(listen_port_),
                                       std::uint8_t(listen_port_ >> 8), 0, 0};
    send_frame(coordinator_fd_, hello);
    const auto reply = recv_frame(coordinator_fd_, kDefaultTimeout);
    if (reply.size() != 5 || reply[0] != kHelloReply)
        throw RunError("socket transport: bad hello reply");
    id_ = int(std::uint32_t(reply[1]) | (std::uint32_t(reply[2]) << 8) |
              (std::uint32_t(reply[3]) << 16) | (std::uint32_t(reply[4]) << 24));
}

SocketWorker::~SocketWorker() {
    close_fd(coordinator_fd_);
    close_fd(listen_fd_);
}

void SocketWorker::send(int dst, const WireMessage& m) {
    if (dst == kCoordinator) {
        send_frame(coordinator_fd_, encode_message(m));
        return;
    }
    const auto it = peer_addr_.find(dst);
    if (it == peer_addr_.end())
        throw RunError("socket transport: peer " + std::to_string(dst) + " not registered");
    auto [host, port] = split_endpoint(it->second);
    int fd = connect_to(host, port);
    try {
        send_frame(fd, encode_message(m));
    } catch (...) {
        close_fd(fd);
        throw;
    }
    close_fd(fd);
}

WireMessage SocketWorker::recv(int src, Millis timeout) {
    if (src == kCoordinator)
        return decode_message(recv_frame(coordinator_fd_, timeout));
    return recv_peer(timeout);
}

WireMessage SocketWorker::recv_any(Millis timeout) {
    return recv(kCoordinator, timeout);
}

WireMessage SocketWorker::recv_peer(Millis timeout) {
    wait_readable(listen_fd_, timeout, "peer transfer");
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) throw RunError("socket transport: accept failed on peer channel");
    try {
        auto m = decode_message(recv_frame(fd, timeout));
        close_fd(fd);
        return m;
    } catch (...) {
        close_fd(fd);
        throw;
    }
}

void SocketWorker::register_peer(int id, const std::string& endpoint) {
    peer_addr_[id] = endpoint;
}

} // namespace nevo::distrib
