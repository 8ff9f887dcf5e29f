#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/socket.h>
#include <unistd.h>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/wire.hpp"

using namespace gradcode;

TEST_CASE("frame layout is length-prefixed little-endian") {
    Frame frame;
    frame.type = FrameType::kGradient;
    frame.worker_id = 7;
    frame.iteration = 0x01020304;
    frame.payload = {0xaa, 0xbb, 0xcc};

    const auto bytes = serialize_frame(frame);
    REQUIRE(bytes.size() == 16);
    // length = 9 + 3 payload bytes
    CHECK(bytes[0] == 12);
    CHECK(bytes[1] == 0);
    CHECK(bytes[2] == 0);
    CHECK(bytes[3] == 0);
    CHECK(bytes[4] == static_cast<std::uint8_t>(FrameType::kGradient));
    CHECK(bytes[5] == 7);
    // iteration little-endian
    CHECK(bytes[9] == 0x04);
    CHECK(bytes[10] == 0x03);
    CHECK(bytes[11] == 0x02);
    CHECK(bytes[12] == 0x01);
    CHECK(bytes[13] == 0xaa);
    CHECK(frame.wire_size() == 16);
}

TEST_CASE("frames round-trip through the parser") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Frame frame;
        frame.type = static_cast<FrameType>(1 + rng.integer(4));
        frame.worker_id = static_cast<std::uint32_t>(rng.integer(1000));
        frame.iteration = static_cast<std::uint32_t>(rng.integer(100000));
        frame.payload.resize(rng.integer(200));
        for (auto &b : frame.payload) b = static_cast<std::uint8_t>(rng.integer(256));

        const Frame back = parse_frame(serialize_frame(frame));
        CHECK(back.type == frame.type);
        CHECK(back.worker_id == frame.worker_id);
        CHECK(back.iteration == frame.iteration);
        CHECK(back.payload == frame.payload);
    }
}

TEST_CASE("malformed frames raise protocol errors") {
    CHECK_THROWS_AS(parse_frame({1, 2, 3}), ProtocolError);

    Frame frame;
    frame.payload = {1, 2, 3, 4};
    auto bytes = serialize_frame(frame);
    bytes[0] = 200;  // length lies
    CHECK_THROWS_AS(parse_frame(bytes), ProtocolError);

    bytes = serialize_frame(frame);
    bytes[4] = 99;  // unknown type
    CHECK_THROWS_AS(parse_frame(bytes), ProtocolError);
}

TEST_CASE("double payloads serialize little-endian and round-trip") {
    Eigen::VectorXd values(3);
    values << 1.0, -2.5, 3e-7;
    const auto bytes = doubles_to_bytes(values);
    REQUIRE(bytes.size() == 24);
    // 1.0 = 0x3FF0000000000000
    CHECK(bytes[7] == 0x3f);
    CHECK(bytes[6] == 0xf0);
    for (int i = 0; i < 6; ++i) CHECK(bytes[static_cast<std::size_t>(i)] == 0);
    CHECK(bytes_to_doubles(bytes) == values);
    CHECK_THROWS_AS(bytes_to_doubles({1, 2, 3}), ProtocolError);
}

TEST_CASE("int payloads round-trip") {
    const std::vector<int> ids = {3, 1, 4, 1, 5};
    CHECK(bytes_to_ints(ints_to_bytes(ids)) == ids);
    CHECK_THROWS_AS(bytes_to_ints({1, 2, 3}), ProtocolError);
}

TEST_CASE("frames and magic travel over a socket pair") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);

    CHECK(send_magic_fd(fds[0]));
    Frame frame;
    frame.type = FrameType::kParams;
    frame.worker_id = 2;
    frame.iteration = 9;
    frame.payload = doubles_to_bytes(Eigen::Vector3d(1.0, 2.0, 3.0));
    CHECK(send_frame_fd(fds[0], frame));

    CHECK(recv_magic_fd(fds[1]));
    const auto got = recv_frame_fd(fds[1]);
    REQUIRE(got.has_value());
    CHECK(got->type == FrameType::kParams);
    CHECK(got->iteration == 9);
    CHECK(bytes_to_doubles(got->payload) == Eigen::Vector3d(1.0, 2.0, 3.0));

    ::close(fds[0]);  // EOF at a frame boundary reads as nullopt
    CHECK_FALSE(recv_frame_fd(fds[1]).has_value());
    ::close(fds[1]);
}

TEST_CASE("bad magic on a socket is a protocol error") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    const char junk[4] = {'J', 'U', 'N', 'K'};
    REQUIRE(::send(fds[0], junk, 4, 0) == 4);
    CHECK_THROWS_AS(recv_magic_fd(fds[1]), ProtocolError);
    ::close(fds[0]);
    ::close(fds[1]);
}

TEST_CASE("a connection dropped mid-frame is a protocol error") {
    int fds[2];
    REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
    Frame frame;
    frame.payload.assign(64, 0x42);
    const auto bytes = serialize_frame(frame);
    REQUIRE(::send(fds[0], bytes.data(), 20, 0) == 20);  // partial frame
    ::close(fds[0]);
    CHECK_THROWS_AS(recv_frame_fd(fds[1]), ProtocolError);
    ::close(fds[1]);
}
