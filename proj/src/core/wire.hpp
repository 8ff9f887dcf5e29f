#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace gradcode {

// Wire format, little-endian throughout. A connection starts with the 4-byte
// magic "GCW1" in each direction, followed by frames:
//   [u32 length] [u8 type] [u32 worker_id] [u32 iteration] [payload]
// where length counts everything after the length field (9 + payload bytes).

inline constexpr std::array<std::uint8_t, 4> kWireMagic = {'G', 'C', 'W', '1'};
inline constexpr std::size_t kFrameHeaderBytes = 9;   // type + worker_id + iteration
inline constexpr std::size_t kFrameOverheadBytes = 13;  // + the length prefix

enum class FrameType : std::uint8_t {
    kAssign = 1,    ///< worker -> master: registration; master -> worker: subset list
    kParams = 2,    ///< master -> worker: current parameter vector
    kGradient = 3,  ///< worker -> master: encoded partial-gradient payload
    kShutdown = 4,  ///< master -> worker: end of run
};

struct Frame {
    FrameType type = FrameType::kAssign;
    std::uint32_t worker_id = 0;
    std::uint32_t iteration = 0;
    std::vector<std::uint8_t> payload;

    std::size_t wire_size() const { return kFrameOverheadBytes + payload.size(); }
};

std::vector<std::uint8_t> serialize_frame(const Frame &frame);
/// Parses one complete frame (including the length prefix); throws
/// ProtocolError on malformed input.
Frame parse_frame(const std::vector<std::uint8_t> &bytes);

std::vector<std::uint8_t> doubles_to_bytes(const Eigen::VectorXd &values);
Eigen::VectorXd bytes_to_doubles(const std::vector<std::uint8_t> &bytes);
std::vector<std::uint8_t> ints_to_bytes(const std::vector<int> &values);
std::vector<int> bytes_to_ints(const std::vector<std::uint8_t> &bytes);

// Socket helpers. send_* return false when the peer is gone (EPIPE et al.);
// recv_frame_fd returns nullopt on a clean EOF and throws ProtocolError on
// malformed frames or mid-frame stream loss.
bool send_magic_fd(int fd);
bool recv_magic_fd(int fd);
bool send_frame_fd(int fd, const Frame &frame);
std::optional<Frame> recv_frame_fd(int fd);

}  // namespace gradcode
