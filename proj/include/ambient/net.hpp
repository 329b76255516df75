#pragma once

// Minimal POSIX TCP plumbing for the NDJSON gateway: listening and
// connecting sockets and a buffered line reader.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "ambient/error.hpp"

namespace ambient {

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            close();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }
    void close() noexcept {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    /// Wakes up any thread blocked on this socket without releasing the fd.
    void shutdown() noexcept {
        if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    }

private:
    int fd_ = -1;
};

struct HostPort {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }
};

/// "host:port" or ":port"; port 0 means any free port when listening.
inline HostPort parse_host_port(std::string_view text) {
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw ArgumentError("address '" + std::string(text) + "' must be host:port");
    HostPort hp;
    if (colon > 0) hp.host = std::string(text.substr(0, colon));
    const auto port_text = std::string(text.substr(colon + 1));
    try {
        std::size_t used = 0;
        long p = std::stol(port_text, &used);
        if (used != port_text.size() || p < 0 || p > 65535) throw std::out_of_range("port");
        hp.port = static_cast<std::uint16_t>(p);
    } catch (const std::exception&) {
        throw ArgumentError("invalid port in address '" + std::string(text) + "'");
    }
    return hp;
}

namespace detail {

inline sockaddr_in resolve_ipv4(const HostPort& hp) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(hp.port);
    if (::inet_pton(AF_INET, hp.host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(hp.host.c_str(), nullptr, &hints, &res);
    if (rc != 0 || res == nullptr) throw TransportError("cannot resolve '" + hp.host + "': " + ::gai_strerror(rc));
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    ::freeaddrinfo(res);
    return addr;
}

inline std::string errno_text() { return std::strerror(errno); }

}  // namespace detail

/// Bound, listening socket. The actual port is written back into `bound`.
inline Socket listen_tcp(const HostPort& hp, HostPort* bound = nullptr, int backlog = 64) {
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw TransportError("socket: " + detail::errno_text());
    int one = 1;
    ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    auto addr = detail::resolve_ipv4(hp);
    if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw TransportError("bind " + hp.str() + ": " + detail::errno_text());
    if (::listen(s.fd(), backlog) != 0) throw TransportError("listen " + hp.str() + ": " + detail::errno_text());
    if (bound) {
        sockaddr_in actual{};
        socklen_t len = sizeof actual;
        ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&actual), &len);
        *bound = hp;
        bound->port = ntohs(actual.sin_port);
    }
    return s;
}

inline Socket connect_tcp(const HostPort& hp) {
    auto addr = detail::resolve_ipv4(hp);
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw TransportError("socket: " + detail::errno_text());
    if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw TransportError("connect " + hp.str() + ": " + detail::errno_text());
    int one = 1;
    ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return s;
}

inline void send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError("send: " + detail::errno_text());
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

inline void send_line(int fd, std::string_view line) {
    std::string buf(line);
    buf.push_back('\n');
    send_all(fd, buf);
}

/// Splits a byte stream into '\n'-terminated lines.
class LineReader {
public:
    explicit LineReader(int fd, std::size_t max_line = 1 << 20) : fd_(fd), max_line_(max_line) {}

    /// Next line without its terminator; nullopt on orderly EOF. A timeout
    /// (when given) or a socket error throws TransportError.
    std::optional<std::string> next(std::optional<std::chrono::milliseconds> timeout = std::nullopt) {
        for (;;) {
            auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buf_.substr(0, nl);
                buf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (buf_.size() > max_line_) throw ProtocolError("line exceeds " + std::to_string(max_line_) + " bytes");
            if (timeout) {
                pollfd p{fd_, POLLIN, 0};
                int rc = ::poll(&p, 1, static_cast<int>(timeout->count()));
                if (rc < 0 && errno == EINTR) continue;
                if (rc < 0) throw TransportError("poll: " + detail::errno_text());
                if (rc == 0) throw TransportError("timed out waiting for peer");
            }
            char chunk[4096];
            ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw TransportError("recv: " + detail::errno_text());
            }
            if (n == 0) return std::nullopt;
            buf_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
    std::size_t max_line_;
    std::string buf_;
};

}  // namespace ambient
