#include "ivbench/iv/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>

#include "ivbench/core/error.hpp"
#include "ivbench/core/text.hpp"

namespace ivbench::iv {

namespace {

std::string coord(std::size_t row, const std::string& column) {
    return "row " + std::to_string(row) + ", column " + column;
}

double median_of(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.X = X.select_rows(rows);
    out.y.reserve(rows.size());
    out.missing_mask.reserve(rows.size() * X.cols());
    for (auto r : rows) {
        out.y.push_back(y[r]);
        const auto first = missing_mask.begin() + static_cast<std::ptrdiff_t>(r * X.cols());
        out.missing_mask.insert(out.missing_mask.end(), first, first + static_cast<std::ptrdiff_t>(X.cols()));
    }
    return out;
}

void Dataset::validate() const {
    if (feature_names.size() != X.cols()) throw ValidationError("feature names do not match matrix width");
    if (y.size() != X.rows()) throw ValidationError("label count does not match row count");
    if (missing_mask.size() != X.rows() * X.cols()) throw ValidationError("missing mask has the wrong shape");
    for (std::size_t i = 0; i < X.rows(); ++i) {
        if (y[i] != 0 && y[i] != 1) throw ValidationError("row " + std::to_string(i) + ": label must be 0 or 1");
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (!std::isfinite(X(i, j))) {
                throw ValidationError("non-finite value at " + coord(i, feature_names[j]));
            }
        }
    }
}

Dataset load_dataset(std::istream& in, const DatasetSchema& schema) {
    std::string line;
    if (!read_record_line(in, line)) throw ValidationError("dataset is empty (no header row)");
    const auto header = split_record(line, schema.delimiter);

    const auto label_it = std::find(header.begin(), header.end(), schema.label_column);
    if (label_it == header.end()) throw ValidationError("header has no label column '" + schema.label_column + "'");
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> names;
    if (schema.feature_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == label_col) continue;
            feature_cols.push_back(c);
            names.push_back(header[c]);
        }
    } else {
        std::string missing;
        for (const auto& name : schema.feature_columns) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                missing += (missing.empty() ? "" : ", ") + name;
                continue;
            }
            feature_cols.push_back(static_cast<std::size_t>(it - header.begin()));
            names.push_back(name);
        }
        if (!missing.empty()) throw ValidationError("header lacks feature columns: " + missing);
    }
    const auto d = feature_cols.size();
    if (d == 0) throw ValidationError("dataset has no feature columns");

    std::vector<std::vector<std::optional<double>>> rows;
    std::vector<int> labels;
    std::size_t file_row = 1;
    std::size_t rows_read = 0;
    std::size_t dropped = 0;
    while (read_record_line(in, line)) {
        ++file_row;
        ++rows_read;
        const auto fields = split_record(line, schema.delimiter);
        if (fields.size() != header.size()) {
            throw ValidationError("row " + std::to_string(file_row) + ": expected " + std::to_string(header.size()) +
                                  " fields, found " + std::to_string(fields.size()));
        }
        const auto& label_cell = fields[label_col];
        int label = -1;
        if (label_cell == "0" || label_cell == "0.0") label = 0;
        if (label_cell == "1" || label_cell == "1.0") label = 1;
        if (label < 0) {
            throw ValidationError(coord(file_row, schema.label_column) + ": label must be 0 or 1, got '" +
                                  label_cell + "'");
        }
        std::vector<std::optional<double>> values(d);
        std::size_t n_missing = 0;
        for (std::size_t j = 0; j < d; ++j) {
            const auto& cell = fields[feature_cols[j]];
            if (cell.empty() || cell == "NA") {
                ++n_missing;
                continue;
            }
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size()) {
                throw ValidationError(coord(file_row, names[j]) + ": cannot parse '" + cell + "'");
            }
            if (!std::isfinite(v)) throw ValidationError(coord(file_row, names[j]) + ": non-finite value");
            values[j] = v;
        }
        if (static_cast<double>(n_missing) > schema.max_missing_fraction * static_cast<double>(d)) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(values));
        labels.push_back(label);
    }
    if (rows.empty()) throw ValidationError("dataset is empty after dropping rows with too many missing values");

    // Per-feature, per-class medians over observed cells of the kept rows.
    std::vector<std::array<std::optional<double>, 2>> class_median(d);
    std::vector<std::optional<double>> overall_median(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> all;
        std::array<std::vector<double>, 2> by_class;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i][j]) continue;
            all.push_back(*rows[i][j]);
            by_class[static_cast<std::size_t>(labels[i])].push_back(*rows[i][j]);
        }
        if (!all.empty()) overall_median[j] = median_of(all);
        for (std::size_t c = 0; c < 2; ++c) {
            if (!by_class[c].empty()) class_median[j][c] = median_of(by_class[c]);
        }
    }

    Dataset out;
    out.feature_names = names;
    out.X = Matrix(rows.size(), d);
    out.y = labels;
    out.missing_mask.assign(rows.size() * d, 0);
    std::size_t imputed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (rows[i][j]) {
                out.X(i, j) = *rows[i][j];
                continue;
            }
            const auto& fill = class_median[j][static_cast<std::size_t>(labels[i])];
            if (fill) {
                out.X(i, j) = *fill;
            } else if (overall_median[j]) {
                out.X(i, j) = *overall_median[j];
            } else {
                throw ValidationError("feature " + names[j] + " has no observed values to impute from");
            }
            out.missing_mask[i * d + j] = 1;
            ++imputed;
        }
    }
    out.report = {rows_read, dropped, imputed};
    return out;
}

Dataset read_dataset(const std::string& path, const DatasetSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset " + path);
    return load_dataset(in, schema);
}

void write_dataset(std::ostream& out, const Dataset& data, const std::string& label_column, char delimiter) {
    for (const auto& name : data.feature_names) out << name << delimiter;
    out << label_column << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dimension(); ++j) out << format_number(data.X(i, j)) << delimiter;
        out << data.y[i] << '\n';
    }
}

}  // namespace ivbench::iv
