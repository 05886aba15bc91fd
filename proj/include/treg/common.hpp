#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace treg {

// Row batches, embeddings and NN activations are all row-major: one row per
// sample, matching the on-disk tensor layout.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

namespace detail {
inline void msg_append(std::ostringstream&) {}

template <typename T, typename... Rest>
void msg_append(std::ostringstream& os, const T& head, const Rest&... rest) {
    os << head;
    msg_append(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string msg(const Args&... args) {
    std::ostringstream os;
    detail::msg_append(os, args...);
    return os.str();
}

template <typename... Args>
[[noreturn]] void fail(const Args&... args) {
    throw std::runtime_error(msg(args...));
}

// splitmix64: used to derive independent sub-seeds (per tree, per trial, ...)
// from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a2c62ed4d1e5ULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x5851f42d4c957f2dULL * (stream + 1));
    return splitmix64(s);
}

inline double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace treg
