#pragma once

// Cloud side of the gateway. CloudCore owns the per-device state and the
// store; CloudServer puts it behind an NDJSON-over-TCP listener with one
// thread per connection.

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ambient/error.hpp"
#include "ambient/llm.hpp"
#include "ambient/net.hpp"
#include "ambient/rules.hpp"
#include "ambient/session.hpp"
#include "ambient/store.hpp"
#include "ambient/wire.hpp"

namespace ambient {

struct CloudConfig {
    SessionConfig session;
    bool use_llm = false;
    std::string prompt_template = std::string(kDefaultPromptTemplate);
};

struct IngestOutcome {
    bool duplicate = false;
    std::vector<Reminder> reminders;
    bool degraded = false;
};

class CloudCore {
public:
    /// `store` and `llm` may be null; the LLM is only consulted when
    /// config.use_llm is set.
    CloudCore(RuleSet rules, CloudConfig config, EventStore* store = nullptr, CompletionClient* llm = nullptr,
              LogFn log = {})
        : rules_(std::move(rules)), config_(std::move(config)), store_(store), llm_(llm), log_(std::move(log)) {
        if (config_.use_llm && !llm_) throw ConfigError("llm verification enabled but no client configured");
    }

    /// Rebuilds device state from stored records without writing to the
    /// store. Open labels are recomputed with the rule engine and topped up
    /// with the labels of stored reminders.
    void restore(const std::vector<Message>& records) {
        const auto source = rule_engine_source(rules_);
        for (const auto& rec : records) {
            if (const auto* e = std::get_if<AtomicActivityEvent>(&rec)) {
                auto& slot = slot_for(e->device_id);
                std::lock_guard lock(slot.mu);
                if (slot.state.is_duplicate(e->seq_no))
                    throw StoreError("stored events for " + e->device_id + " are not in seq_no order");
                advance_session(slot.state, *e, source);
            } else if (const auto* r = std::get_if<Reminder>(&rec)) {
                auto& slot = slot_for(r->device_id);
                std::lock_guard lock(slot.mu);
                slot.state.open_labels.insert(r->complex_label);
            }
        }
    }

    IngestOutcome ingest(const AtomicActivityEvent& e) {
        if (failed_.load()) throw StoreError("service stopped after a store failure; event refused");
        auto& slot = slot_for(e.device_id);
        std::lock_guard lock(slot.mu);
        IngestOutcome out;
        if (slot.state.is_duplicate(e.seq_no)) {
            out.duplicate = true;
            return out;
        }
        persist(Message{e});

        bool degraded = false;
        FindingSource source = [&](const std::vector<std::string>& seq) -> std::vector<Finding> {
            if (!config_.use_llm) return check_sequence(seq, rules_).findings;
            LlmCheckResult r;
            {
                std::lock_guard llm_lock(llm_mu_);
                r = verify_with_llm(seq, rules_, *llm_, config_.prompt_template);
            }
            degraded = r.degraded;
            for (const auto& note : r.notes) log("llm: " + note);
            return r.findings;
        };
        out.reminders = advance_session(slot.state, e, source);
        out.degraded = degraded;
        if (!out.reminders.empty()) {
            std::vector<Message> batch(out.reminders.begin(), out.reminders.end());
            persist(batch);
        }
        return out;
    }

    bool failed() const noexcept { return failed_.load(); }

    std::optional<DeviceState> device(const std::string& id) const {
        std::lock_guard lock(map_mu_);
        auto it = devices_.find(id);
        if (it == devices_.end()) return std::nullopt;
        std::lock_guard slot_lock(it->second->mu);
        return it->second->state;
    }

    std::map<std::string, DeviceState> snapshot() const {
        std::lock_guard lock(map_mu_);
        std::map<std::string, DeviceState> out;
        for (const auto& [id, slot] : devices_) {
            std::lock_guard slot_lock(slot->mu);
            out.emplace(id, slot->state);
        }
        return out;
    }

    const RuleSet& rules() const noexcept { return rules_; }

private:
    struct Slot {
        explicit Slot(SessionConfig cfg) : state(cfg) {}
        mutable std::mutex mu;
        DeviceState state;
    };

    Slot& slot_for(const std::string& id) {
        std::lock_guard lock(map_mu_);
        auto it = devices_.find(id);
        if (it == devices_.end()) it = devices_.emplace(id, std::make_unique<Slot>(config_.session)).first;
        return *it->second;
    }

    template <typename Batch>
    void persist(const Batch& batch) {
        if (!store_) return;
        try {
            if constexpr (std::is_same_v<Batch, Message>)
                store_->append(batch);
            else
                store_->append(std::span<const Message>(batch));
        } catch (const StoreError& e) {
            failed_.store(true);
            log(std::string("store failure, refusing further events: ") + e.what());
            throw;
        }
    }

    void log(const std::string& line) const {
        if (log_) log_(line);
    }

    RuleSet rules_;
    CloudConfig config_;
    EventStore* store_;
    CompletionClient* llm_;
    LogFn log_;
    std::mutex llm_mu_;
    mutable std::mutex map_mu_;
    std::map<std::string, std::unique_ptr<Slot>> devices_;
    std::atomic<bool> failed_{false};
};

/// Handles one line from a device; returns the lines to send back.
inline std::vector<std::string> handle_line(CloudCore& core, const std::string& line) {
    std::vector<std::string> replies;
    Message msg;
    try {
        msg = decode(line);
    } catch (const ProtocolError& e) {
        replies.push_back(encode(ErrorReply{std::string("protocol error: ") + e.what()}));
        return replies;
    }
    const auto* event = std::get_if<AtomicActivityEvent>(&msg);
    if (!event) {
        replies.push_back(encode(ErrorReply{"protocol error: only event messages are accepted"}));
        return replies;
    }
    try {
        auto outcome = core.ingest(*event);
        for (const auto& r : outcome.reminders) replies.push_back(encode(r));
        replies.push_back(encode(Ack{event->seq_no}));
    } catch (const StoreError& e) {
        replies.push_back(encode(ErrorReply{std::string("store error: ") + e.what()}));
    } catch (const Error& e) {
        replies.push_back(encode(ErrorReply{std::string("ingest error: ") + e.what()}));
    }
    return replies;
}

class CloudServer {
public:
    CloudServer(CloudCore& core, LogFn log = {}) : core_(core), log_(std::move(log)) {}
    CloudServer(const CloudServer&) = delete;
    CloudServer& operator=(const CloudServer&) = delete;
    ~CloudServer() { stop(); }

    /// Binds and starts accepting; returns the bound address.
    HostPort start(const HostPort& addr) {
        if (running_.load()) throw ArgumentError("server already running");
        listener_ = listen_tcp(addr, &bound_);
        running_.store(true);
        acceptor_ = std::thread([this] { accept_loop(); });
        if (log_) log_("listening on " + bound_.str());
        return bound_;
    }

    void stop() {
        if (!running_.exchange(false)) return;
        listener_.shutdown();
        if (acceptor_.joinable()) acceptor_.join();
        std::vector<std::thread> threads;
        {
            std::lock_guard lock(conn_mu_);
            for (auto& c : conns_) c->sock.shutdown();
            for (auto& c : conns_) threads.push_back(std::move(c->worker));
        }
        for (auto& t : threads)
            if (t.joinable()) t.join();
        {
            std::lock_guard lock(conn_mu_);
            conns_.clear();
        }
        listener_.close();
    }

    const HostPort& address() const noexcept { return bound_; }

private:
    struct Conn {
        Socket sock;
        std::thread worker;
        std::atomic<bool> done{false};
    };

    void accept_loop() {
        while (running_.load()) {
            int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
            if (fd < 0) {
                if (errno == EINTR) continue;
                break;  // listener shut down
            }
            std::lock_guard lock(conn_mu_);
            if (!running_.load()) {
                ::close(fd);
                break;
            }
            reap_finished();
            auto conn = std::make_unique<Conn>();
            conn->sock = Socket(fd);
            Conn* raw = conn.get();
            conn->worker = std::thread([this, raw] {
                serve(raw->sock.fd());
                raw->done.store(true);
            });
            conns_.push_back(std::move(conn));
        }
    }

    // Caller holds conn_mu_.
    void reap_finished() {
        for (auto it = conns_.begin(); it != conns_.end();) {
            if ((*it)->done.load()) {
                if ((*it)->worker.joinable()) (*it)->worker.join();
                it = conns_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void serve(int fd) {
        LineReader reader(fd);
        try {
            while (auto line = reader.next()) {
                if (line->empty()) continue;
                for (const auto& reply : handle_line(core_, *line)) send_line(fd, reply);
            }
        } catch (const Error& e) {
            if (running_.load() && log_) log_(std::string("connection closed: ") + e.what());
        }
        ::shutdown(fd, SHUT_RDWR);
    }

    CloudCore& core_;
    LogFn log_;
    Socket listener_;
    HostPort bound_;
    std::atomic<bool> running_{false};
    std::thread acceptor_;
    std::mutex conn_mu_;
    std::vector<std::unique_ptr<Conn>> conns_;
};

}  // namespace ambient
