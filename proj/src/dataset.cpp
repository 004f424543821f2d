#include "railpca/dataset.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace railpca {

const char* const kDatasetHeader = "scenario_id,class,phase,soil,snr_db,seed,f1,f2,f3,f4,f5,f6,f7,f8";

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::stod(s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

std::string dataset_to_csv(const std::vector<DatasetRow>& rows) {
    std::ostringstream out;
    out << kDatasetHeader << "\n";
    for (const auto& r : rows) {
        out << r.scenario_id << ',' << r.class_id << ',' << r.phase << ',' << r.soil << ','
            << format_double(r.snr_db) << ',' << r.seed;
        for (std::size_t i = 0; i < 8; ++i) {
            out << ',';
            if (i < r.features.size()) out << format_double(r.features[i]);
        }
        out << "\n";
    }
    return out.str();
}

std::vector<DatasetRow> dataset_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigurationError("dataset is empty");
    if (split_csv_line(line) != split_csv_line(kDatasetHeader)) {
        throw ConfigurationError("dataset header mismatch; expected: " +
                                 std::string(kDatasetHeader));
    }
    std::vector<DatasetRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 14) {
            throw ConfigurationError("dataset line " + std::to_string(line_no) + " has " +
                                     std::to_string(f.size()) + " fields, expected 14");
        }
        DatasetRow r;
        r.scenario_id = f[0];
        r.class_id = f[1];
        r.phase = std::stoi(f[2]);
        r.soil = f[3];
        r.snr_db = parse_double(f[4]);
        r.seed = std::strtoull(f[5].c_str(), nullptr, 10);
        for (int i = 0; i < 8; ++i) {
            if (!f[6 + i].empty()) r.features.push_back(parse_double(f[6 + i]));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigurationError("cannot write '" + path + "'");
    out << dataset_to_csv(rows);
}

std::vector<DatasetRow> read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigurationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return dataset_from_csv(ss.str());
}

}  // namespace railpca
