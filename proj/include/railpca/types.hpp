#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace railpca {

using Complex = std::complex<double>;
using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXcd = Eigen::MatrixXcd;
using Matrix4cd = Eigen::Matrix4cd;
using Vector4cd = Eigen::Vector4cd;

/// Thrown when an operation receives arguments outside its domain.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a model set or bundle is missing required pieces.
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rail position within a track.
enum class Rail { external, internal };

inline char rail_char(Rail r) { return r == Rail::external ? 'e' : 'i'; }

inline Rail rail_from_char(char c) {
    if (c == 'e') return Rail::external;
    if (c == 'i') return Rail::internal;
    throw ParameterError(std::string("invalid rail '") + c + "' (expected 'e' or 'i')");
}

// Conductor indexing follows the feature-vector order:
//   0 = track 1 external, 1 = track 1 internal, 2 = track 2 internal, 3 = track 2 external.
inline int conductor_index(int track, Rail rail) {
    if (track != 1 && track != 2) throw ParameterError("track must be 1 or 2");
    if (track == 1) return rail == Rail::external ? 0 : 1;
    return rail == Rail::internal ? 2 : 3;
}

inline int conductor_track(int c) { return c < 2 ? 1 : 2; }
inline Rail conductor_rail(int c) { return (c == 0 || c == 3) ? Rail::external : Rail::internal; }

/// Short conductor name in measurement order: "1e", "1i", "2i", "2e".
inline std::string conductor_symbol(int conductor) {
    return std::to_string(conductor_track(conductor)) + rail_char(conductor_rail(conductor));
}

/// Names the eight measured currents, conductor-major within each end.
/// end: 'e' = emitter, 'r' = receiver.
inline std::string current_symbol(int conductor, char end) {
    return "I" + conductor_symbol(conductor) + "_" + end;
}

}  // namespace railpca
