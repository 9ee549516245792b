#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chebstack/dataset.hpp"
#include "chebstack/errors.hpp"

namespace chebstack {

enum class DatasetFormat { Ucr, Csv };

inline DatasetFormat parse_format(std::string_view name) {
    if (name == "ucr") return DatasetFormat::Ucr;
    if (name == "csv") return DatasetFormat::Csv;
    throw ConfigError("unknown dataset format \"" + std::string(name) +
                      "\"; expected ucr or csv");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line,
                                                  std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || delims.find(line[i]) != std::string_view::npos) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_number(std::string_view token, std::size_t line_no,
                           std::size_t field_no) {
    const std::string_view t = trim(token);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ParseError("line " + std::to_string(line_no) + ", field " +
                         std::to_string(field_no) + ": \"" + std::string(token) +
                         "\" is not a number");
    return value;
}

// Lines of the file with 1-based numbering, blank lines dropped.
inline std::vector<std::pair<std::size_t, std::string>> numbered_lines(
    const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ParseError("cannot open file: " + path);
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (trim(line).empty()) continue;
        lines.emplace_back(no, line);
    }
    return lines;
}

}  // namespace detail

/// One record per line, class label first, the rest features; tab- or
/// comma-delimited. The two distinct labels map to targets {0, 1} in
/// ascending label order.
inline Dataset load_ucr(const std::string& path) {
    const auto lines = detail::numbered_lines(path);
    if (lines.empty()) throw ParseError("file has no data rows: " + path);

    std::vector<double> labels;
    std::vector<std::vector<double>> features;
    std::vector<double> distinct;
    std::size_t expected_fields = 0;
    for (const auto& [no, text] : lines) {
        const auto fields = detail::split_fields(text, ",\t");
        if (expected_fields == 0) {
            expected_fields = fields.size();
            if (expected_fields < 2)
                throw ParseError("line " + std::to_string(no) +
                                 ": a record needs a class label and at least one feature");
        } else if (fields.size() != expected_fields) {
            throw ParseError("line " + std::to_string(no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(expected_fields));
        }
        const double label = detail::parse_number(fields[0], no, 1);
        if (std::find(distinct.begin(), distinct.end(), label) == distinct.end()) {
            distinct.push_back(label);
            if (distinct.size() > 2)
                throw ParseError("line " + std::to_string(no) +
                                 " introduces a third class label; only two-class files "
                                 "can map to {0, 1}");
        }
        labels.push_back(label);
        std::vector<double> row;
        row.reserve(fields.size() - 1);
        for (std::size_t f = 1; f < fields.size(); ++f)
            row.push_back(detail::parse_number(fields[f], no, f + 1));
        features.push_back(std::move(row));
    }

    std::sort(distinct.begin(), distinct.end());
    std::vector<DataPoint> pts;
    pts.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double target = (distinct.size() == 2 && labels[i] == distinct[1]) ? 1.0
                                                                                 : 0.0;
        pts.push_back({std::move(features[i]), target});
    }
    return Dataset(std::move(pts));
}

/// Comma-separated with a header row; `target_column` names the target, every
/// other column is a feature in header order.
inline Dataset load_csv(const std::string& path, const std::string& target_column) {
    const auto lines = detail::numbered_lines(path);
    if (lines.empty()) throw ParseError("file has no header row: " + path);

    const auto header = detail::split_fields(lines.front().second, ",");
    std::optional<std::size_t> target_idx;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (detail::trim(header[i]) == target_column) {
            target_idx = i;
            break;
        }
    }
    if (!target_idx)
        throw ConfigError("target column \"" + target_column + "\" not found in header of " +
                          path);

    std::vector<DataPoint> pts;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto& [no, text] = lines[r];
        const auto fields = detail::split_fields(text, ",");
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        DataPoint p;
        p.features.reserve(header.size() - 1);
        for (std::size_t f = 0; f < fields.size(); ++f) {
            const double v = detail::parse_number(fields[f], no, f + 1);
            if (f == *target_idx)
                p.target = v;
            else
                p.features.push_back(v);
        }
        pts.push_back(std::move(p));
    }
    if (pts.empty()) throw ParseError("file has no data rows: " + path);
    return Dataset(std::move(pts));
}

inline Dataset load_dataset(const std::string& path, DatasetFormat format,
                            const std::string& target_column = "") {
    if (format == DatasetFormat::Ucr) return load_ucr(path);
    if (target_column.empty())
        throw ConfigError("csv format needs --target naming the target column");
    return load_csv(path, target_column);
}

/// Weights file: JSON array [w0, w1, ..., wd] with the bias first.
inline WeightVector load_weights(const std::string& path) {
    std::ifstream in(path);
    if (!in.is_open()) throw ParseError("cannot open file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid weights JSON in " + path + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw ParseError("weights file must hold a nonempty JSON array [w0, w1, ...]: " +
                         path);
    std::vector<double> values;
    for (const auto& v : doc) {
        if (!v.is_number())
            throw ParseError("weights array holds a non-numeric entry in " + path);
        values.push_back(v.get<double>());
        if (!std::isfinite(values.back()))
            throw ParseError("weights array holds a non-finite entry in " + path);
    }
    WeightVector w;
    w.bias = values.front();
    w.weights.assign(values.begin() + 1, values.end());
    return w;
}

/// CSV with header x1..xd,y that load_csv(path, "y") reads back verbatim.
inline void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out.is_open()) throw ParseError("cannot open file for writing: " + path);
    for (std::size_t k = 0; k < data.dimension(); ++k) out << 'x' << (k + 1) << ',';
    out << "y\n";
    char buf[40];
    for (const DataPoint& p : data) {
        for (double v : p.features) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", p.target);
        out << buf << '\n';
    }
    if (!out.good()) throw ParseError("failed writing " + path);
}

}  // namespace chebstack
