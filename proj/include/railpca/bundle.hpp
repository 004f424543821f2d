#pragma once

#include <string>

#include "railpca/detector.hpp"

namespace railpca {

/// Model bundle serialisation, format_version 1. Per-class entries carry
/// {phase, class_label, n, m, K, psi, U (column-major), eigenvalues, S, S_inv,
/// rmse_at_m, t2_threshold}; numbers round-trip at full double precision.
std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& json_text);

void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

}  // namespace railpca
