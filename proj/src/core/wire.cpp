#include "core/wire.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "core/errors.hpp"

namespace gradcode {

namespace {

constexpr std::size_t kMaxFrameBytes = std::size_t{1} << 30;

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32(const std::uint8_t *p) {
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

bool valid_type(std::uint8_t t) {
    return t >= static_cast<std::uint8_t>(FrameType::kAssign) &&
           t <= static_cast<std::uint8_t>(FrameType::kShutdown);
}

/// Writes the whole buffer; false once the peer is unreachable.
bool send_all(int fd, const std::uint8_t *data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t wrote = ::send(fd, data + done, size - done, MSG_NOSIGNAL);
        if (wrote < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(wrote);
    }
    return true;
}

/// Reads exactly size bytes. Returns false on EOF at a frame boundary
/// (done == 0); throws on EOF mid-read.
bool recv_all(int fd, std::uint8_t *data, std::size_t size) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t got = ::recv(fd, data + done, size - done, 0);
        if (got < 0) {
            if (errno == EINTR) continue;
            throw IoError(std::string("recv failed: ") + std::strerror(errno));
        }
        if (got == 0) {
            if (done == 0) return false;
            throw ProtocolError("connection closed mid-frame");
        }
        done += static_cast<std::size_t>(got);
    }
    return true;
}

}  // namespace

std::vector<std::uint8_t> serialize_frame(const Frame &frame) {
    std::vector<std::uint8_t> out;
    out.reserve(frame.wire_size());
    put_u32(out, static_cast<std::uint32_t>(kFrameHeaderBytes + frame.payload.size()));
    out.push_back(static_cast<std::uint8_t>(frame.type));
    put_u32(out, frame.worker_id);
    put_u32(out, frame.iteration);
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

Frame parse_frame(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < kFrameOverheadBytes) throw ProtocolError("frame shorter than its header");
    const std::uint32_t length = get_u32(bytes.data());
    if (length < kFrameHeaderBytes || length > kMaxFrameBytes)
        throw ProtocolError("frame length field out of range");
    if (bytes.size() != 4 + static_cast<std::size_t>(length))
        throw ProtocolError("frame length field does not match the buffer");
    if (!valid_type(bytes[4])) throw ProtocolError("unknown frame type " + std::to_string(bytes[4]));
    Frame frame;
    frame.type = static_cast<FrameType>(bytes[4]);
    frame.worker_id = get_u32(bytes.data() + 5);
    frame.iteration = get_u32(bytes.data() + 9);
    frame.payload.assign(bytes.begin() + 13, bytes.end());
    return frame;
}

std::vector<std::uint8_t> doubles_to_bytes(const Eigen::VectorXd &values) {
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(values.size()) * 8);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &values[i], sizeof bits);
        for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
    return out;
}

Eigen::VectorXd bytes_to_doubles(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() % 8 != 0) throw ProtocolError("float payload length not a multiple of 8");
    Eigen::VectorXd out(static_cast<Eigen::Index>(bytes.size() / 8));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(bytes[static_cast<std::size_t>(i) * 8 +
                                                     static_cast<std::size_t>(b)])
                    << (8 * b);
        std::memcpy(&out[i], &bits, sizeof bits);
    }
    return out;
}

std::vector<std::uint8_t> ints_to_bytes(const std::vector<int> &values) {
    std::vector<std::uint8_t> out;
    out.reserve(values.size() * 4);
    for (int v : values) put_u32(out, static_cast<std::uint32_t>(v));
    return out;
}

std::vector<int> bytes_to_ints(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() % 4 != 0) throw ProtocolError("int payload length not a multiple of 4");
    std::vector<int> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<int>(get_u32(bytes.data() + i * 4));
    return out;
}

bool send_magic_fd(int fd) { return send_all(fd, kWireMagic.data(), kWireMagic.size()); }

bool recv_magic_fd(int fd) {
    std::array<std::uint8_t, 4> magic{};
    if (!recv_all(fd, magic.data(), magic.size())) return false;
    if (magic != kWireMagic) throw ProtocolError("bad connection magic");
    return true;
}

bool send_frame_fd(int fd, const Frame &frame) {
    const auto bytes = serialize_frame(frame);
    return send_all(fd, bytes.data(), bytes.size());
}

std::optional<Frame> recv_frame_fd(int fd) {
    std::uint8_t prefix[4];
    if (!recv_all(fd, prefix, 4)) return std::nullopt;
    const std::uint32_t length = get_u32(prefix);
    if (length < kFrameHeaderBytes || length > kMaxFrameBytes)
        throw ProtocolError("frame length field out of range");
    std::vector<std::uint8_t> rest(length);
    if (!recv_all(fd, rest.data(), rest.size())) throw ProtocolError("connection closed mid-frame");
    std::vector<std::uint8_t> whole;
    whole.reserve(4 + rest.size());
    whole.insert(whole.end(), prefix, prefix + 4);
    whole.insert(whole.end(), rest.begin(), rest.end());
    return parse_frame(whole);
}

}  // namespace gradcode
