#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dsglm/dataset.hpp"
#include "dsglm/errors.hpp"

namespace dsglm::csv {

namespace detail {

// RFC 4180 tokenizer: quoted fields may contain commas, doubled quotes and
// newlines; records end at LF or CRLF outside quotes.
inline std::vector<std::vector<std::string>> parse_records(
    const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(record);
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;  // next field exists even if empty
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(ch);
                field_started = true;
                break;
        }
    }
    if (!field.empty() || field_started || !record.empty()) end_record();
    // Blank lines (e.g. a trailing double newline) are not records.
    std::erase_if(records, [](const std::vector<std::string>& r) {
        return r.size() == 1 && r[0].empty();
    });
    return records;
}

inline std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

inline bool parse_double(const std::string& raw, double& out) {
    const std::string s = trimmed(raw);
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;  // from_chars rejects a leading plus
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace detail

// Shortest round-trip decimal form; parsing it back recovers the exact
// double, which is what keeps report round-trips lossless and runs
// byte-comparable.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Load a labeled dataset: every non-label column is a numeric feature, in
// file order. Labels must be {0,1} or exactly two distinct values, in which
// case the minority value maps to 1.
inline Dataset load_csv(const std::string& path,
                        const std::string& label_column) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::IoError, "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    auto records = detail::parse_records(text);
    require(records.size() >= 2, ErrorCode::EmptyFile,
            path + " has no data rows");

    const auto& header = records.front();
    int label_idx = -1;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (detail::trimmed(header[j]) == label_column) {
            label_idx = static_cast<int>(j);
            break;
        }
    }
    require(label_idx >= 0, ErrorCode::MissingColumn,
            "label column '" + label_column + "' not found in " + path);

    const int n_cols = static_cast<int>(header.size());
    const int d = n_cols - 1;
    require(d >= 1, ErrorCode::NonNumericFeature,
            path + " has no feature columns");
    const Eigen::Index n = static_cast<Eigen::Index>(records.size()) - 1;

    Eigen::MatrixXd X(n, d);
    std::vector<std::string> raw_labels(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = records[static_cast<std::size_t>(i) + 1];
        require(static_cast<int>(row.size()) == n_cols, ErrorCode::IoError,
                "row " + std::to_string(i + 2) + " has " +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(n_cols));
        int col = 0;
        for (int j = 0; j < n_cols; ++j) {
            if (j == label_idx) {
                raw_labels[static_cast<std::size_t>(i)] = detail::trimmed(row[static_cast<std::size_t>(j)]);
                continue;
            }
            double v;
            if (!detail::parse_double(row[static_cast<std::size_t>(j)], v)) {
                fail(ErrorCode::NonNumericFeature,
                     "column '" + detail::trimmed(header[static_cast<std::size_t>(j)]) +
                         "' is not numeric at row " + std::to_string(i + 2));
            }
            X(i, col++) = v;
        }
    }

    // Label mapping.
    Eigen::VectorXd y(n);
    bool all_numeric = true;
    std::vector<double> numeric(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n && all_numeric; ++i) {
        all_numeric = detail::parse_double(raw_labels[static_cast<std::size_t>(i)],
                                           numeric[static_cast<std::size_t>(i)]);
    }
    if (all_numeric) {
        bool zero_one = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (numeric[static_cast<std::size_t>(i)] != 0.0 &&
                numeric[static_cast<std::size_t>(i)] != 1.0) {
                zero_one = false;
                break;
            }
        }
        if (zero_one) {
            for (Eigen::Index i = 0; i < n; ++i)
                y[i] = numeric[static_cast<std::size_t>(i)];
            return Dataset::make(std::move(X), std::move(y),
                                 Origin::ingested(path));
        }
    }
    std::map<std::string, std::int64_t> counts;
    for (const auto& s : raw_labels) ++counts[s];
    require(counts.size() == 2, ErrorCode::NonBinaryLabel,
            "label column '" + label_column + "' has " +
                std::to_string(counts.size()) + " distinct values, expected 2");
    auto it = counts.begin();
    const auto& first = *it;
    const auto& second = *std::next(it);
    // Minority class maps to 1; ties break toward the later value in sort
    // order so the mapping stays deterministic.
    const std::string minority =
        first.second < second.second ? first.first : second.first;
    for (Eigen::Index i = 0; i < n; ++i) {
        y[i] = raw_labels[static_cast<std::size_t>(i)] == minority ? 1.0 : 0.0;
    }
    return Dataset::make(std::move(X), std::move(y), Origin::ingested(path));
}

// Dataset writer: header x1..xd,y. load_csv reads these files back.
inline std::string dataset_to_csv(const Dataset& data,
                                  const std::string& label_name = "y") {
    std::string out;
    for (int j = 0; j < data.dim(); ++j) {
        out += "x" + std::to_string(j + 1) + ",";
    }
    out += label_name + "\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.dim(); ++j) {
            out += format_double(data.X(i, j));
            out += ',';
        }
        out += data.y[i] == 1.0 ? "1" : "0";
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::IoError, "cannot write " + path);
    out << content;
    require(out.good(), ErrorCode::IoError, "write failed for " + path);
}

}  // namespace dsglm::csv
