#pragma once

// Append-only NDJSON log of events and reminders. Each append is one batch
// followed by fsync; replay tolerates a torn final line.

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "ambient/error.hpp"
#include "ambient/wire.hpp"

namespace ambient {

struct StoreReplay {
    std::vector<Message> records;
    std::vector<std::string> warnings;
    std::size_t truncated_bytes = 0;
};

/// Reads every record. A corrupt or unterminated last line is cut off the
/// file (with a warning); a corrupt interior line throws StoreError.
inline StoreReplay store_replay(const std::string& path, bool repair = true) {
    StoreReplay out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;  // nothing written yet
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    std::size_t pos = 0, lineno = 0, good_end = 0;
    while (pos < data.size()) {
        ++lineno;
        auto nl = data.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const std::size_t end = terminated ? nl : data.size();
        std::string_view line(data.data() + pos, end - pos);
        const bool last = !terminated || end + 1 >= data.size();
        try {
            if (!terminated) throw ProtocolError("unterminated record");
            if (!line.empty()) out.records.push_back(decode(line));
        } catch (const ProtocolError& e) {
            if (!last)
                throw StoreError("corrupt record at line " + std::to_string(lineno) + " of " + path + ": " + e.what());
            out.truncated_bytes = data.size() - good_end;
            out.warnings.push_back("dropped corrupt trailing record at line " + std::to_string(lineno) + " (" +
                                   std::to_string(out.truncated_bytes) + " bytes): " + e.what());
            if (repair && ::truncate(path.c_str(), static_cast<off_t>(good_end)) != 0)
                throw StoreError("cannot truncate " + path + ": " + std::strerror(errno));
            break;
        }
        pos = end + 1;
        good_end = pos;
    }
    return out;
}

class EventStore {
public:
    explicit EventStore(std::string path) : path_(std::move(path)) {
        fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
        if (fd_ < 0) throw StoreError("cannot open store " + path_ + ": " + std::strerror(errno));
    }
    EventStore(const EventStore&) = delete;
    EventStore& operator=(const EventStore&) = delete;
    ~EventStore() {
        if (fd_ >= 0) ::close(fd_);
    }

    /// Writes the batch as consecutive lines, then fsyncs. Serialized
    /// across threads.
    void append(std::span<const Message> batch) {
        if (batch.empty()) return;
        std::string buf;
        for (const auto& m : batch) {
            buf += encode(m);
            buf += '\n';
        }
        std::lock_guard lock(mu_);
        const char* p = buf.data();
        std::size_t left = buf.size();
        while (left > 0) {
            ssize_t n = ::write(fd_, p, left);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw StoreError("write to " + path_ + " failed: " + std::strerror(errno));
            }
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        if (::fsync(fd_) != 0) throw StoreError("fsync of " + path_ + " failed: " + std::strerror(errno));
    }

    void append(const Message& m) { append(std::span<const Message>(&m, 1)); }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
    int fd_ = -1;
    std::mutex mu_;
};

}  // namespace ambient
