#include "railpca/bundle.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace railpca {

using nlohmann::json;

namespace {

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

// Column-major flattening, dimensions carried separately.
json matrix_to_json(const MatrixXd& m) {
    json arr = json::array();
    for (int c = 0; c < m.cols(); ++c) {
        for (int r = 0; r < m.rows(); ++r) arr.push_back(m(r, c));
    }
    return arr;
}

VectorXd vector_from_json(const json& arr) {
    VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
    return v;
}

MatrixXd matrix_from_json(const json& arr, int rows, int cols) {
    if (static_cast<int>(arr.size()) != rows * cols) {
        throw ConfigurationError("bundle matrix has wrong element count");
    }
    MatrixXd m(rows, cols);
    std::size_t k = 0;
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) m(r, c) = arr[k++].get<double>();
    }
    return m;
}

json model_to_json(const PcaClassModel& m, int phase) {
    return json{{"phase", phase},
                {"class_label", m.class_label},
                {"n", m.n},
                {"m", m.m},
                {"K", m.training_K},
                {"psi", vector_to_json(m.mean)},
                {"U", matrix_to_json(m.transform)},
                {"eigenvalues", vector_to_json(m.eigenvalues)},
                {"S", matrix_to_json(m.covariance)},
                {"S_inv", matrix_to_json(m.inv_covariance)},
                {"rmse_at_m", m.rmse_at_m},
                {"degenerate", m.degenerate},
                {"t2_threshold", m.t2_threshold}};
}

PcaClassModel model_from_json(const json& j) {
    PcaClassModel m;
    m.class_label = j.at("class_label").get<std::string>();
    m.n = j.at("n").get<int>();
    m.m = j.at("m").get<int>();
    m.training_K = j.at("K").get<int>();
    m.mean = vector_from_json(j.at("psi"));
    m.eigenvalues = vector_from_json(j.at("eigenvalues"));
    m.transform = matrix_from_json(j.at("U"), m.n, m.m);
    m.covariance = matrix_from_json(j.at("S"), m.n, m.n);
    m.inv_covariance = matrix_from_json(j.at("S_inv"), m.n, m.n);
    m.rmse_at_m = j.at("rmse_at_m").get<double>();
    m.degenerate = j.value("degenerate", false);
    m.t2_threshold = j.at("t2_threshold").get<double>();
    if (static_cast<int>(m.mean.size()) != m.n || static_cast<int>(m.eigenvalues.size()) != m.n) {
        throw ConfigurationError("bundle model '" + m.class_label + "' has inconsistent sizes");
    }
    return m;
}

}  // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
    json phases;
    for (int p = 1; p <= 3; ++p) {
        json arr = json::array();
        for (const auto& m : bundle.phase(p)) arr.push_back(model_to_json(m, p));
        phases[std::to_string(p)] = arr;
    }
    json j;
    j["format_version"] = 1;
    j["phases"] = phases;
    json triples = json::array();
    for (const auto& t : bundle.provenance.rows) {
        triples.push_back(json::array({t.class_id, t.snr_db, t.seed}));
    }
    j["provenance"] = {{"rows", triples}, {"soil", bundle.provenance.soil}};
    // Compact dump: provenance row lists make pretty-printing very large.
    return j.dump();
}

ModelBundle bundle_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(std::string("bundle is not valid JSON: ") + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
        throw ConfigurationError("bundle format_version mismatch (expected 1)");
    }
    ModelBundle b;
    if (j.contains("phases")) {
        for (int p = 1; p <= 3; ++p) {
            const std::string key = std::to_string(p);
            if (!j["phases"].contains(key)) continue;
            for (const auto& mj : j["phases"][key]) {
                b.phase(p).push_back(model_from_json(mj));
            }
        }
    }
    if (j.contains("provenance")) {
        const auto& pj = j["provenance"];
        if (pj.contains("rows")) {
            for (const auto& tj : pj["rows"]) {
                b.provenance.rows.push_back({tj.at(0).get<std::string>(),
                                             tj.at(1).get<double>(),
                                             tj.at(2).get<std::uint64_t>()});
            }
        }
        b.provenance.soil = pj.value("soil", "");
    }
    return b;
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write '" + path + "'");
    out << bundle_to_json(bundle);
}

ModelBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return bundle_from_json(ss.str());
}

}  // namespace railpca
