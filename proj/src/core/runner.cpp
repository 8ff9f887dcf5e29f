#include "core/runner.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <thread>

#include "core/cyclic.hpp"
#include "core/errors.hpp"
#include "core/optimizer.hpp"
#include "core/rng.hpp"
#include "core/wire.hpp"

namespace gradcode {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Scheme-independent encode/decode facade for the runner.
struct Codec {
    SchemeKind kind;
    CodingParams params;
    std::optional<VandermondeScheme> vander;
    std::optional<StableScheme> stable;
    double condition_limit = VandermondeScheme::kDefaultConditionLimit;

    static Codec make(const TrainConfig &cfg, int dim) {
        Codec codec;
        codec.kind = cfg.scheme;
        if (cfg.scheme == SchemeKind::kNaive) {
            codec.params = CodingParams::make(cfg.n, 1, 0, 1, dim);
            return codec;
        }
        codec.params = CodingParams::make(cfg.n, cfg.d, cfg.s, cfg.m, dim);
        if (codec.params.slack() != 0)
            throw ArgumentError("train: coded schemes run on the d = s + m frontier");
        if (cfg.scheme == SchemeKind::kVandermonde)
            codec.vander = VandermondeScheme::build(codec.params, cfg.theta);
        else
            codec.stable = StableScheme::build(codec.params, cfg.kappa, cfg.seed);
        return codec;
    }

    std::vector<int> assignment(int worker_id) const {
        return worker_assignment(worker_id, params.n, params.d);
    }

    Eigen::VectorXd encode(int worker_id, const std::vector<Eigen::VectorXd> &grads) const {
        switch (kind) {
            case SchemeKind::kNaive:
                if (grads.size() != 1) throw ArgumentError("naive encode: expected one gradient");
                return grads.front();
            case SchemeKind::kVandermonde:
                return vander->encode(worker_id, grads);
            case SchemeKind::kStable:
                return stable->encode(worker_id, grads);
        }
        throw ArgumentError("unknown scheme");
    }

    Eigen::VectorXd decode(const std::vector<EncodedMessage> &messages) const {
        switch (kind) {
            case SchemeKind::kNaive: {
                if (static_cast<int>(messages.size()) != params.n)
                    throw ArgumentError("naive decode: need all n gradients");
                Eigen::VectorXd sum = Eigen::VectorXd::Zero(params.raw_dim);
                for (const auto &msg : messages) sum += msg.payload;
                return sum;
            }
            case SchemeKind::kVandermonde:
                return vander->decode(messages, condition_limit);
            case SchemeKind::kStable:
                return stable->decode(messages);
        }
        throw ArgumentError("unknown scheme");
    }
};

const StragglerSpec *find_straggler(const TrainConfig &cfg, int worker_id) {
    for (const auto &spec : cfg.stragglers)
        if (spec.worker_id == worker_id) return &spec;
    return nullptr;
}

std::vector<Eigen::VectorXd> worker_gradients(const Codec &codec, const Dataset &data,
                                              int worker_id, const Eigen::VectorXd &beta) {
    std::vector<Eigen::VectorXd> grads;
    for (int subset : codec.assignment(worker_id))
        grads.push_back(partial_gradient(data.features, data.labels,
                                         data.subsets[static_cast<std::size_t>(subset - 1)], beta));
    return grads;
}

struct IterationStats {
    std::vector<double> healthy_ms;

    double median_ms() const {
        if (healthy_ms.empty()) return 0.0;
        std::vector<double> sorted = healthy_ms;
        std::sort(sorted.begin(), sorted.end());
        return sorted[sorted.size() / 2];
    }

    double deadline_sec(double floor_sec) const {
        return std::max(floor_sec, 30.0 * median_ms() / 1000.0);
    }
};

void finish_result(TrainResult *result, const IterationStats &stats) {
    result->median_iteration_ms = stats.median_ms();
}

// ---------------------------------------------------------------------------
// single-process simulation

TrainResult train_single_process(const TrainConfig &cfg, const Codec &codec, const Dataset &data) {
    const int dim = data.dim();
    const int need = codec.params.messages_needed();
    NagState state = NagState::init(Eigen::VectorXd::Zero(dim));
    Rng order_rng(cfg.seed ^ 0xda3e39cb94b95bdbULL);

    TrainResult result;
    result.gradient_payload_bytes = static_cast<std::uint64_t>(codec.params.payload_dim()) * 8;
    result.gradient_frame_bytes = result.gradient_payload_bytes + kFrameOverheadBytes;
    IterationStats stats;

    for (int t = 0; t < cfg.iterations; ++t) {
        const auto start = Clock::now();
        // Arrival order: seeded shuffle of the live workers, stably reordered
        // by injected delay; the first n - s make the cut.
        std::vector<int> live;
        for (int i = 1; i <= cfg.n; ++i) {
            const StragglerSpec *spec = find_straggler(cfg, i);
            if (spec && spec->mode == StragglerSpec::Mode::kDie &&
                t >= static_cast<int>(spec->amount))
                continue;
            live.push_back(i);
        }
        for (int i = static_cast<int>(live.size()) - 1; i > 0; --i)
            std::swap(live[static_cast<std::size_t>(i)],
                      live[order_rng.integer(static_cast<std::uint64_t>(i + 1))]);
        std::stable_sort(live.begin(), live.end(), [&](int a, int b) {
            const StragglerSpec *sa = find_straggler(cfg, a);
            const StragglerSpec *sb = find_straggler(cfg, b);
            const double da = sa && sa->mode == StragglerSpec::Mode::kDelay ? sa->amount : 0.0;
            const double db = sb && sb->mode == StragglerSpec::Mode::kDelay ? sb->amount : 0.0;
            return da < db;
        });
        if (static_cast<int>(live.size()) < need) {
            result.timed_out = true;
            result.abort_reason = "iteration " + std::to_string(t) + ": only " +
                                  std::to_string(live.size()) + " live workers, need " +
                                  std::to_string(need);
            break;
        }

        std::vector<EncodedMessage> messages;
        for (int c = 0; c < need; ++c) {
            const int worker = live[static_cast<std::size_t>(c)];
            messages.push_back({worker, codec.encode(worker, worker_gradients(codec, data, worker,
                                                                              state.beta))});
        }
        state = nag_step(state, codec.decode(messages), cfg.eta, cfg.momentum);

        IterationLog entry;
        entry.iteration = t;
        entry.wall_ms = seconds_since(start) * 1000.0;
        entry.loss = mean_logistic_loss(data, state.beta);
        entry.auc = holdout_auc(data, state.beta);
        entry.bytes_rx = static_cast<std::uint64_t>(need) * result.gradient_frame_bytes;
        result.log.push_back(entry);
        stats.healthy_ms.push_back(entry.wall_ms);
        if (cfg.record_trajectory) result.trajectory.push_back(state.beta);
    }
    result.beta = state.beta;
    finish_result(&result, stats);
    return result;
}

// ---------------------------------------------------------------------------
// multiprocess mode

struct ScopedFd {
    int fd = -1;
    ScopedFd() = default;
    explicit ScopedFd(int f) : fd(f) {}
    ScopedFd(const ScopedFd &) = delete;
    ScopedFd &operator=(const ScopedFd &) = delete;
    ScopedFd(ScopedFd &&other) noexcept : fd(other.fd) { other.fd = -1; }
    ScopedFd &operator=(ScopedFd &&other) noexcept {
        if (this != &other) {
            reset();
            fd = other.fd;
            other.fd = -1;
        }
        return *this;
    }
    ~ScopedFd() { reset(); }
    void reset() {
        if (fd >= 0) ::close(fd);
        fd = -1;
    }
};

ScopedFd listen_loopback(std::uint16_t *port_out) {
    ScopedFd fd(::socket(AF_INET, SOCK_STREAM, 0));
    if (fd.fd < 0) throw IoError("socket() failed");
    const int one = 1;
    ::setsockopt(fd.fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd.fd, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0)
        throw IoError("bind() failed");
    if (::listen(fd.fd, 128) != 0) throw IoError("listen() failed");
    socklen_t len = sizeof addr;
    if (::getsockname(fd.fd, reinterpret_cast<sockaddr *>(&addr), &len) != 0)
        throw IoError("getsockname() failed");
    *port_out = ntohs(addr.sin_port);
    return fd;
}

ScopedFd connect_loopback(std::uint16_t port, double deadline_sec) {
    const auto start = Clock::now();
    while (true) {
        ScopedFd fd(::socket(AF_INET, SOCK_STREAM, 0));
        if (fd.fd < 0) throw IoError("socket() failed");
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(port);
        if (::connect(fd.fd, reinterpret_cast<sockaddr *>(&addr), sizeof addr) == 0) return fd;
        if (seconds_since(start) > deadline_sec) throw IoError("connect() timed out");
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
}

[[noreturn]] void worker_process(const TrainConfig &cfg, const Codec &codec, const Dataset &data,
                                 int worker_id, std::uint16_t port) {
    try {
        ScopedFd fd = connect_loopback(port, 15.0);
        if (!send_magic_fd(fd.fd)) _exit(1);
        if (!send_frame_fd(fd.fd, {FrameType::kAssign, static_cast<std::uint32_t>(worker_id), 0, {}}))
            _exit(1);
        if (!recv_magic_fd(fd.fd)) _exit(1);
        const auto reply = recv_frame_fd(fd.fd);
        if (!reply || reply->type != FrameType::kAssign) _exit(1);
        if (bytes_to_ints(reply->payload) != codec.assignment(worker_id)) _exit(1);

        const StragglerSpec *spec = find_straggler(cfg, worker_id);
        while (true) {
            const auto frame = recv_frame_fd(fd.fd);
            if (!frame || frame->type == FrameType::kShutdown) break;
            if (frame->type != FrameType::kParams) throw ProtocolError("worker: unexpected frame");
            const int t = static_cast<int>(frame->iteration);
            if (spec && spec->mode == StragglerSpec::Mode::kDie && t >= static_cast<int>(spec->amount))
                break;  // killed: drop the connection without replying
            const Eigen::VectorXd beta = bytes_to_doubles(frame->payload);
            const Eigen::VectorXd payload =
                codec.encode(worker_id, worker_gradients(codec, data, worker_id, beta));
            if (spec && spec->mode == StragglerSpec::Mode::kDelay)
                std::this_thread::sleep_for(std::chrono::duration<double>(spec->amount));
            if (!send_frame_fd(fd.fd, {FrameType::kGradient, static_cast<std::uint32_t>(worker_id),
                                       frame->iteration, doubles_to_bytes(payload)}))
                break;
        }
        _exit(0);
    } catch (...) {
        _exit(1);
    }
}

struct WorkerLink {
    ScopedFd fd;
    bool alive = false;
};

/// Accepts and registers all n workers; links[i-1] serves worker i.
std::vector<WorkerLink> register_workers(int listen_fd, const Codec &codec, int n,
                                         double deadline_sec) {
    std::vector<WorkerLink> links(static_cast<std::size_t>(n));
    const auto start = Clock::now();
    int registered = 0;
    while (registered < n) {
        const double remaining = deadline_sec - seconds_since(start);
        if (remaining <= 0.0) throw TimeoutError("master: worker registration timed out");
        pollfd pfd{listen_fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, static_cast<int>(remaining * 1000.0) + 1);
        if (ready < 0 && errno != EINTR) throw IoError("poll() failed during registration");
        if (ready <= 0) continue;
        ScopedFd conn(::accept(listen_fd, nullptr, nullptr));
        if (conn.fd < 0) continue;
        if (!recv_magic_fd(conn.fd)) continue;
        const auto hello = recv_frame_fd(conn.fd);
        if (!hello || hello->type != FrameType::kAssign) continue;
        const int worker_id = static_cast<int>(hello->worker_id);
        if (worker_id < 1 || worker_id > n || links[static_cast<std::size_t>(worker_id - 1)].alive)
            throw ProtocolError("master: bad registration from worker " + std::to_string(worker_id));
        if (!send_magic_fd(conn.fd)) continue;
        if (!send_frame_fd(conn.fd, {FrameType::kAssign, hello->worker_id, 0,
                                     ints_to_bytes(codec.assignment(worker_id))}))
            continue;
        links[static_cast<std::size_t>(worker_id - 1)] = {std::move(conn), true};
        ++registered;
    }
    return links;
}

TrainResult master_loop(const TrainConfig &cfg, const Codec &codec, const Dataset &data,
                        std::vector<WorkerLink> &links) {
    const int dim = data.dim();
    const int need = codec.params.messages_needed();
    NagState state = NagState::init(Eigen::VectorXd::Zero(dim));

    TrainResult result;
    result.gradient_payload_bytes = static_cast<std::uint64_t>(codec.params.payload_dim()) * 8;
    result.gradient_frame_bytes = result.gradient_payload_bytes + kFrameOverheadBytes;
    IterationStats stats;

    for (int t = 0; t < cfg.iterations; ++t) {
        const auto start = Clock::now();
        const Frame params_frame{FrameType::kParams, 0, static_cast<std::uint32_t>(t),
                                 doubles_to_bytes(state.beta)};
        for (auto &link : links)
            if (link.alive && !send_frame_fd(link.fd.fd, params_frame)) {
                link.alive = false;
                link.fd.reset();
            }

        std::map<int, EncodedMessage> collected;
        std::uint64_t bytes_rx = 0;
        const double deadline = stats.deadline_sec(cfg.timeout_floor_sec);
        while (static_cast<int>(collected.size()) < need) {
            const double remaining = deadline - seconds_since(start);
            if (remaining <= 0.0) {
                result.timed_out = true;
                result.abort_reason =
                    "iteration " + std::to_string(t) + ": collected " +
                    std::to_string(collected.size()) + " of " + std::to_string(need) +
                    " gradients within " + std::to_string(deadline) + " s";
                result.beta = state.beta;
                finish_result(&result, stats);
                return result;
            }
            std::vector<pollfd> pfds;
            std::vector<int> owners;
            for (int i = 0; i < cfg.n; ++i)
                if (links[static_cast<std::size_t>(i)].alive) {
                    pfds.push_back({links[static_cast<std::size_t>(i)].fd.fd, POLLIN, 0});
                    owners.push_back(i);
                }
            if (pfds.empty()) {
                result.timed_out = true;
                result.abort_reason = "iteration " + std::to_string(t) + ": all workers gone";
                result.beta = state.beta;
                finish_result(&result, stats);
                return result;
            }
            const int ready =
                ::poll(pfds.data(), pfds.size(), static_cast<int>(remaining * 1000.0) + 1);
            if (ready < 0 && errno != EINTR) throw IoError("poll() failed during collection");
            if (ready <= 0) continue;
            for (std::size_t p = 0; p < pfds.size(); ++p) {
                if (static_cast<int>(collected.size()) >= need) break;  // barrier reached
                if (!(pfds[p].revents & (POLLIN | POLLHUP | POLLERR))) continue;
                WorkerLink &link = links[static_cast<std::size_t>(owners[p])];
                try {
                    const auto frame = recv_frame_fd(link.fd.fd);
                    if (!frame) {
                        link.alive = false;
                        link.fd.reset();
                        continue;
                    }
                    if (frame->type != FrameType::kGradient) throw ProtocolError("master: unexpected frame");
                    if (static_cast<int>(frame->iteration) != t) continue;  // stale; discard
                    const int worker_id = owners[p] + 1;
                    if (collected.count(worker_id)) continue;
                    EncodedMessage msg{worker_id, bytes_to_doubles(frame->payload)};
                    if (msg.payload.size() != static_cast<Eigen::Index>(codec.params.payload_dim()))
                        throw ProtocolError("master: gradient payload has wrong dimension");
                    bytes_rx += frame->wire_size();
                    collected.emplace(worker_id, std::move(msg));
                } catch (const Error &) {
                    link.alive = false;
                    link.fd.reset();
                }
            }
        }

        std::vector<EncodedMessage> messages;
        messages.reserve(collected.size());
        for (auto &entry : collected) messages.push_back(std::move(entry.second));
        state = nag_step(state, codec.decode(messages), cfg.eta, cfg.momentum);

        IterationLog entry;
        entry.iteration = t;
        entry.wall_ms = seconds_since(start) * 1000.0;
        entry.loss = mean_logistic_loss(data, state.beta);
        entry.auc = holdout_auc(data, state.beta);
        entry.bytes_rx = bytes_rx;
        result.log.push_back(entry);
        stats.healthy_ms.push_back(entry.wall_ms);
        if (cfg.record_trajectory) result.trajectory.push_back(state.beta);
    }

    result.beta = state.beta;
    finish_result(&result, stats);
    return result;
}

void reap_children(std::vector<pid_t> &children) {
    const auto start = Clock::now();
    while (!children.empty()) {
        for (auto it = children.begin(); it != children.end();) {
            int status = 0;
            const pid_t r = ::waitpid(*it, &status, WNOHANG);
            if (r == *it || (r < 0 && errno == ECHILD))
                it = children.erase(it);
            else
                ++it;
        }
        if (children.empty()) break;
        if (seconds_since(start) > 5.0) {
            for (pid_t pid : children) ::kill(pid, SIGKILL);
            for (pid_t pid : children) ::waitpid(pid, nullptr, 0);
            children.clear();
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

TrainResult train_multiprocess(const TrainConfig &cfg, const Codec &codec, const Dataset &data) {
    std::uint16_t port = 0;
    ScopedFd listener = listen_loopback(&port);

    std::vector<pid_t> children;
    for (int i = 1; i <= cfg.n; ++i) {
        const pid_t pid = ::fork();
        if (pid < 0) {
            for (pid_t child : children) ::kill(child, SIGKILL);
            reap_children(children);
            throw IoError("fork() failed");
        }
        if (pid == 0) {
            listener.reset();
            worker_process(cfg, codec, data, i, port);  // never returns
        }
        children.push_back(pid);
    }

    TrainResult result;
    try {
        std::vector<WorkerLink> links = register_workers(listener.fd, codec, cfg.n, 30.0);
        listener.reset();
        result = master_loop(cfg, codec, data, links);
        const Frame bye{FrameType::kShutdown, 0, 0, {}};
        for (auto &link : links)
            if (link.alive) send_frame_fd(link.fd.fd, bye);
        links.clear();
    } catch (...) {
        for (pid_t child : children) ::kill(child, SIGKILL);
        reap_children(children);
        throw;
    }
    reap_children(children);
    return result;
}

}  // namespace

TrainResult train(const TrainConfig &config) {
    TrainConfig cfg = config;
    if (cfg.scheme == SchemeKind::kNaive) {
        cfg.d = 1;
        cfg.s = 0;
        cfg.m = 1;
    }
    if (cfg.n < 1) throw ArgumentError("train: n must be positive");
    if (cfg.iterations < 1) throw ArgumentError("train: need at least one iteration");

    Dataset data = cfg.data.csv_path.empty()
                       ? synth_data(cfg.data.synthetic_samples, cfg.dim, cfg.n,
                                    cfg.holdout_fraction, cfg.seed)
                       : load_csv_dataset(cfg.data.csv_path, cfg.n, cfg.holdout_fraction, cfg.seed);
    const Codec codec = Codec::make(cfg, data.dim());

    if (cfg.single_process) return train_single_process(cfg, codec, data);
    return train_multiprocess(cfg, codec, data);
}

void write_log_csv(const std::vector<IterationLog> &log, const std::string &path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open log for writing: " + path);
    out << "iteration,wall_ms,loss,auc,bytes_rx\n";
    char buf[160];
    for (const auto &entry : log) {
        std::snprintf(buf, sizeof buf, "%d,%.3f,%.9g,%.6f,%llu\n", entry.iteration, entry.wall_ms,
                      entry.loss, entry.auc, static_cast<unsigned long long>(entry.bytes_rx));
        out << buf;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace gradcode
