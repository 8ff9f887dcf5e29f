#include "core/matrix_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/errors.hpp"

namespace gradcode {

namespace {

constexpr std::array<char, 4> kMagicVandermonde = {'G', 'C', 'M', '1'};
constexpr std::array<char, 4> kMagicStable = {'G', 'C', 'S', '1'};

void put_u32(std::ostream &out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                           static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(bytes, 4);
}

void put_u64(std::ostream &out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v));
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f64(std::ostream &out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

std::uint32_t get_u32(std::istream &in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char *>(bytes), 4)) throw IoError("scheme file: truncated header");
    return static_cast<std::uint32_t>(bytes[0]) | static_cast<std::uint32_t>(bytes[1]) << 8 |
           static_cast<std::uint32_t>(bytes[2]) << 16 | static_cast<std::uint32_t>(bytes[3]) << 24;
}

std::uint64_t get_u64(std::istream &in) {
    const std::uint64_t lo = get_u32(in);
    return lo | static_cast<std::uint64_t>(get_u32(in)) << 32;
}

double get_f64(std::istream &in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

void put_matrix(std::ostream &out, const Eigen::MatrixXd &mat) {
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
        for (Eigen::Index c = 0; c < mat.cols(); ++c) put_f64(out, mat(r, c));
}

Eigen::MatrixXd get_matrix(std::istream &in, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd mat(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) mat(r, c) = get_f64(in);
    if (!in) throw IoError("scheme file: truncated matrix payload");
    return mat;
}

std::ofstream open_out(const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

void put_params(std::ostream &out, const CodingParams &p) {
    put_u32(out, static_cast<std::uint32_t>(p.n));
    put_u32(out, static_cast<std::uint32_t>(p.k));
    put_u32(out, static_cast<std::uint32_t>(p.d));
    put_u32(out, static_cast<std::uint32_t>(p.s));
    put_u32(out, static_cast<std::uint32_t>(p.m));
    put_u32(out, static_cast<std::uint32_t>(p.raw_dim));
}

CodingParams get_params(std::istream &in) {
    const int n = static_cast<int>(get_u32(in));
    const int k = static_cast<int>(get_u32(in));
    const int d = static_cast<int>(get_u32(in));
    const int s = static_cast<int>(get_u32(in));
    const int m = static_cast<int>(get_u32(in));
    const int l = static_cast<int>(get_u32(in));
    if (k != n) throw IoError("scheme file: k != n is not supported");
    return CodingParams::make(n, d, s, m, l);
}

}  // namespace

void save_scheme(const VandermondeScheme &scheme, const std::string &path) {
    auto out = open_out(path);
    out.write(kMagicVandermonde.data(), 4);
    put_params(out, scheme.params());
    put_matrix(out, scheme.evaluation_matrix());
    put_matrix(out, scheme.encoding_matrix());
    if (!out) throw IoError("write failed: " + path);
}

void save_scheme(const StableScheme &scheme, const std::string &path) {
    auto out = open_out(path);
    out.write(kMagicStable.data(), 4);
    put_params(out, scheme.params());
    put_u64(out, scheme.seed());
    put_f64(out, scheme.kappa());
    put_matrix(out, scheme.evaluation_matrix());
    put_matrix(out, scheme.encoding_matrix());
    if (!out) throw IoError("write failed: " + path);
}

SchemeFileKind peek_scheme_kind(const std::string &path) {
    auto in = open_in(path);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4)) throw IoError("scheme file: missing magic");
    if (magic == kMagicVandermonde) return SchemeFileKind::kVandermonde;
    if (magic == kMagicStable) return SchemeFileKind::kStable;
    throw IoError("scheme file: unrecognized magic in " + path);
}

VandermondeScheme load_vandermonde_scheme(const std::string &path) {
    auto in = open_in(path);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || magic != kMagicVandermonde)
        throw IoError("scheme file: expected GCM1 magic in " + path);
    const CodingParams params = get_params(in);
    Eigen::MatrixXd v = get_matrix(in, params.n - params.s, params.n);
    Eigen::MatrixXd b =
        get_matrix(in, static_cast<Eigen::Index>(params.m) * params.n, params.n - params.s);
    return VandermondeScheme::from_matrices(params, std::move(v), std::move(b));
}

StableScheme load_stable_scheme(const std::string &path) {
    auto in = open_in(path);
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || magic != kMagicStable)
        throw IoError("scheme file: expected GCS1 magic in " + path);
    const CodingParams params = get_params(in);
    const std::uint64_t seed = get_u64(in);
    const double kappa = get_f64(in);
    Eigen::MatrixXd v = get_matrix(in, params.n - params.s, params.n);
    Eigen::MatrixXd b =
        get_matrix(in, static_cast<Eigen::Index>(params.m) * params.n, params.n - params.s);
    return StableScheme::from_matrices(params, kappa, seed, std::move(v), std::move(b));
}

}  // namespace gradcode
