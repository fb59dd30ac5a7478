#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sacsp {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Error category; the CLI maps these onto its exit codes.
enum class ErrorKind {
    Config,      // bad parameters, schema violations
    Invalid,     // dimension/precondition violations on data
    Numeric,     // solver non-convergence, degenerate statistics
    Io,          // file format / filesystem failures
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_config(const std::string& msg) {
    throw Error(ErrorKind::Config, msg);
}
[[noreturn]] inline void throw_invalid(const std::string& msg) {
    throw Error(ErrorKind::Invalid, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
    throw Error(ErrorKind::Numeric, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorKind::Io, msg);
}

/// One fixed-length data window with a class label. Channels are rows.
struct Epoch {
    RealMatrix data;  // n_channels x n_samples, microvolts
    int label = 0;    // 1 or 2
    double fs = 0.0;  // Hz
};

/// Labeled epoch collection with shared sampling metadata.
struct EpochSet {
    std::vector<Epoch> epochs;
    double fs = 0.0;
    Index n_channels = 0;

    Index n_samples() const {
        return epochs.empty() ? 0 : epochs.front().data.cols();
    }
    Index count(int label) const {
        Index c = 0;
        for (const auto& e : epochs) c += (e.label == label) ? 1 : 0;
        return c;
    }
};

struct Marker {
    Index sample = 0;  // sample index into the recording
    int label = 0;     // 1 or 2
    bool trial_end = false;
};

/// Continuous multichannel recording with event markers.
struct ContinuousRecording {
    Index n_channels = 0;
    double fs = 0.0;
    RealMatrix samples;  // n_channels x T
    std::vector<Marker> markers;
};

/// Deterministic stream splitting for seeded parallel work (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sacsp
