#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "railpca/types.hpp"

namespace railpca {

/// One dataset row. Feature columns f1..f8 carry the feature vector of the
/// row's phase: 4 values for independent-injection rows (f5..f8 empty),
/// 8 for joint rows. End-to-end measurement sets additionally use phase-1
/// rows with both track vectors packed as f1..f4 = track 1, f5..f8 = track 2.
struct DatasetRow {
    std::string scenario_id;
    std::string class_id;
    int phase = 0;
    std::string soil;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> features;
};

/// Fixed header: scenario_id,class,phase,soil,snr_db,seed,f1,...,f8.
extern const char* const kDatasetHeader;

std::string dataset_to_csv(const std::vector<DatasetRow>& rows);
std::vector<DatasetRow> dataset_from_csv(const std::string& csv_text);

void write_dataset_csv(const std::string& path, const std::vector<DatasetRow>& rows);
std::vector<DatasetRow> read_dataset_csv(const std::string& path);

}  // namespace railpca
