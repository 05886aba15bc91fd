#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "treg/common.hpp"

namespace treg {

struct DatasetFile {
    std::string path;
    bool has_header = true;
    bool has_label = true;     // false: every column is a feature, y stays empty
    std::string label_column;  // column name, or numeric index; empty = last column
    char delimiter = ',';
};

// Per-column encoder fitted at ingestion. Numeric columns pass values through
// (missing -> 0); categorical columns map values to first-appearance ordinals,
// and unseen values at apply time to the reserved code -1.
struct ColumnEncoder {
    bool categorical = false;
    std::vector<std::string> categories;

    std::optional<long> code_of(const std::string& value) const {
        for (std::size_t i = 0; i < categories.size(); ++i)
            if (categories[i] == value) return static_cast<long>(i);
        return std::nullopt;
    }
};

struct IngestResult {
    Mat X;
    std::vector<int> y;
    std::vector<std::string> feature_names;
    std::vector<ColumnEncoder> encoders;  // one per feature column
    std::vector<std::string> warnings;
};

namespace csv_detail {

// RFC-4180-style records: quoted fields with "" escapes, embedded newlines
// allowed inside quotes, CRLF tolerated.
inline std::vector<std::vector<std::string>> parse_records(const std::string& text,
                                                           char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            end_field();
            field_started = false;
        } else if (c == '\n') {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) fail("csv: unterminated quoted field");
    if (!field.empty() || field_started || !record.empty()) end_record();
    // Drop a trailing fully-empty record produced by a final newline.
    if (!records.empty() && records.back().size() == 1 && records.back()[0].empty())
        records.pop_back();
    return records;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return std::nullopt;
    return v;
}

}  // namespace csv_detail

namespace csv_detail {

struct ParsedTable {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    long label_index = -1;
};

inline ParsedTable load_table(const std::string& text, const DatasetFile& opts) {
    auto records = parse_records(text, opts.delimiter);
    if (records.empty()) fail("csv: empty file");

    ParsedTable table;
    std::size_t begin = 0;
    const std::size_t width = records[0].size();
    if (opts.has_header) {
        table.names = records[0];
        begin = 1;
    } else {
        for (std::size_t c = 0; c < width; ++c) table.names.push_back(msg("c", c));
    }
    for (std::size_t r = begin; r < records.size(); ++r) {
        if (records[r].size() != width)
            fail("csv: row ", r + 1, " has ", records[r].size(), " fields, expected ", width);
        table.rows.push_back(std::move(records[r]));
    }
    if (table.rows.empty()) fail("csv: no data rows");

    if (!opts.has_label) {
        table.label_index = -1;
        return table;
    }
    if (opts.label_column.empty()) {
        table.label_index = static_cast<long>(width) - 1;
    } else if (auto idx = parse_number(opts.label_column);
               idx && *idx == static_cast<long>(*idx) && opts.label_column.find_first_not_of(
                   "0123456789") == std::string::npos) {
        table.label_index = static_cast<long>(*idx);
    } else {
        table.label_index = -1;
        for (std::size_t c = 0; c < table.names.size(); ++c)
            if (table.names[c] == opts.label_column) table.label_index = static_cast<long>(c);
        if (table.label_index < 0) fail("csv: missing label column '", opts.label_column, "'");
    }
    if (table.label_index < 0 || table.label_index >= static_cast<long>(width))
        fail("csv: label column index ", table.label_index, " out of range");
    return table;
}

inline ColumnEncoder fit_encoder(const ParsedTable& table, long col) {
    ColumnEncoder enc;
    for (const auto& row : table.rows) {
        const std::string& cell = row[col];
        if (cell.empty()) continue;  // missing, imputed as zero later
        if (!parse_number(cell)) {
            enc.categorical = true;
            break;
        }
    }
    if (enc.categorical) {
        for (const auto& row : table.rows) {
            const std::string& cell = row[col];
            if (cell.empty()) continue;
            if (!enc.code_of(cell)) enc.categories.push_back(cell);
        }
    }
    return enc;
}

inline double encode_cell(const std::string& cell, const ColumnEncoder& enc,
                          const std::string& column_name, std::vector<std::string>* warnings) {
    if (cell.empty()) return 0.0;  // missing value -> zero
    if (!enc.categorical) {
        auto v = parse_number(cell);
        if (!v) fail("csv: non-numeric value '", cell, "' in numeric column ", column_name);
        return *v;
    }
    if (auto code = enc.code_of(cell)) return static_cast<double>(*code);
    if (warnings)
        warnings->push_back(msg("column ", column_name, ": unseen category '", cell,
                                "' encoded as -1"));
    return -1.0;
}

inline IngestResult encode_table(const ParsedTable& table,
                                 const std::vector<ColumnEncoder>* fitted) {
    const long width = static_cast<long>(table.names.size());
    const long n = static_cast<long>(table.rows.size());
    IngestResult out;

    std::vector<long> feature_cols;
    for (long c = 0; c < width; ++c)
        if (c != table.label_index) feature_cols.push_back(c);
    for (long c : feature_cols) out.feature_names.push_back(table.names[c]);

    if (fitted) {
        if (fitted->size() != feature_cols.size())
            fail("csv: encoder count ", fitted->size(), " does not match ", feature_cols.size(),
                 " feature columns");
        out.encoders = *fitted;
    } else {
        for (long c : feature_cols) out.encoders.push_back(fit_encoder(table, c));
    }

    out.X = Mat(n, static_cast<long>(feature_cols.size()));
    for (long i = 0; i < n; ++i)
        for (std::size_t j = 0; j < feature_cols.size(); ++j)
            out.X(i, static_cast<long>(j)) =
                encode_cell(table.rows[i][feature_cols[j]], out.encoders[j],
                            out.feature_names[j], &out.warnings);

    if (table.label_index < 0) return out;

    // Label: numeric columns must already be 0/1; categorical labels are
    // first-appearance encoded and must have at most two levels.
    ColumnEncoder label_enc = fit_encoder(table, table.label_index);
    if (label_enc.categorical && label_enc.categories.size() > 2)
        fail("csv: non-binary labels (", label_enc.categories.size(), " classes)");
    out.y.resize(n);
    for (long i = 0; i < n; ++i) {
        double v = encode_cell(table.rows[i][table.label_index], label_enc,
                               table.names[table.label_index], nullptr);
        if (v != 0.0 && v != 1.0) fail("csv: non-binary labels (value ", v, ")");
        out.y[i] = static_cast<int>(v);
    }
    return out;
}

}  // namespace csv_detail

inline IngestResult ingest_csv_text(const std::string& text, const DatasetFile& opts,
                                    const std::vector<ColumnEncoder>* fitted = nullptr) {
    return csv_detail::encode_table(csv_detail::load_table(text, opts), fitted);
}

inline IngestResult ingest_csv(const DatasetFile& file,
                               const std::vector<ColumnEncoder>* fitted = nullptr) {
    std::ifstream is(file.path, std::ios::binary);
    if (!is) fail("csv: cannot open ", file.path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return ingest_csv_text(buf.str(), file, fitted);
}

inline nlohmann::json encoders_to_json(const std::vector<ColumnEncoder>& encoders) {
    nlohmann::json j = nlohmann::json::array();
    for (const ColumnEncoder& enc : encoders) {
        if (enc.categorical)
            j.push_back({{"kind", "categorical"}, {"categories", enc.categories}});
        else
            j.push_back({{"kind", "numeric"}});
    }
    return j;
}

inline std::vector<ColumnEncoder> encoders_from_json(const nlohmann::json& j) {
    std::vector<ColumnEncoder> encoders;
    try {
        for (const auto& je : j) {
            ColumnEncoder enc;
            const std::string kind = je.at("kind").get<std::string>();
            if (kind == "categorical") {
                enc.categorical = true;
                enc.categories = je.at("categories").get<std::vector<std::string>>();
            } else if (kind != "numeric") {
                fail("csv: unknown encoder kind '", kind, "'");
            }
            encoders.push_back(std::move(enc));
        }
    } catch (const nlohmann::json::exception& e) {
        fail("csv: bad encoders json: ", e.what());
    }
    return encoders;
}

}  // namespace treg
