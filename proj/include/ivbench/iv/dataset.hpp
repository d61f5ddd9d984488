#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ivbench/core/matrix.hpp"

namespace ivbench::iv {

struct IngestionReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;
    std::size_t cells_imputed = 0;
};

// Binary-labelled feature matrix. After ingestion no entry is missing;
// `missing_mask` marks the cells that were imputed.
struct Dataset {
    std::vector<std::string> feature_names;
    Matrix X;
    std::vector<int> y;
    std::vector<std::uint8_t> missing_mask;  // row-major, same shape as X
    IngestionReport report;

    std::size_t size() const noexcept { return X.rows(); }
    std::size_t dimension() const noexcept { return X.cols(); }
    bool imputed(std::size_t row, std::size_t col) const { return missing_mask[row * X.cols() + col] != 0; }

    std::size_t count_label(int label) const;
    Dataset subset(std::span<const std::size_t> rows) const;
    // Shapes agree, labels are 0/1, every entry finite. Errors carry coordinates.
    void validate() const;
};

struct DatasetSchema {
    std::string label_column = "label";
    // Empty means every column other than the label, in file order.
    std::vector<std::string> feature_columns;
    char delimiter = ',';
    // Rows with a strictly larger fraction of missing features are dropped.
    double max_missing_fraction = 0.25;
};

// Missing cells are the literal "NA" or an empty field. Remaining gaps are
// filled with the per-class median of the feature over the kept rows (the
// overall median when a class has no observed value).
Dataset load_dataset(std::istream& in, const DatasetSchema& schema = {});
Dataset read_dataset(const std::string& path, const DatasetSchema& schema = {});

void write_dataset(std::ostream& out, const Dataset& data, const std::string& label_column = "label",
                   char delimiter = ',');

}  // namespace ivbench::iv
