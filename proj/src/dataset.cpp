#include "emml/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emml/rng.hpp"

namespace emml {

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::nominal: return "nominal";
        case ColumnKind::ordinal: return "ordinal";
        case ColumnKind::target: return "target";
    }
    return "numeric";
}

ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "nominal") return ColumnKind::nominal;
    if (s == "ordinal") return ColumnKind::ordinal;
    if (s == "target") return ColumnKind::target;
    throw Error("unknown column kind: '" + s + "'");
}

void validate_schema(const std::vector<ColumnSchema>& schema, bool require_target) {
    if (schema.empty()) throw Error("schema is empty");
    std::set<std::string> names;
    std::size_t targets = 0;
    for (const auto& col : schema) {
        if (!names.insert(col.name).second)
            throw Error("duplicate column name in schema: '" + col.name + "'");
        if (col.kind == ColumnKind::target) ++targets;
        if (col.kind == ColumnKind::ordinal) {
            if (col.ordinal_order.empty())
                throw Error("ordinal column '" + col.name + "' has empty ordinal_order");
            std::set<std::string> cats(col.ordinal_order.begin(), col.ordinal_order.end());
            if (cats.size() != col.ordinal_order.size())
                throw Error("ordinal column '" + col.name + "' has duplicate categories");
        } else if (!col.ordinal_order.empty()) {
            throw Error("column '" + col.name + "' is not ordinal but has ordinal_order");
        }
    }
    if (require_target && targets != 1)
        throw Error("schema must have exactly one target column, found " +
                    std::to_string(targets));
    if (!require_target && targets > 1)
        throw Error("schema has more than one target column");
}

std::vector<ColumnSchema> schema_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid schema JSON: ") + e.what());
    }
    if (!j.is_array()) throw Error("schema JSON must be an array");
    std::vector<ColumnSchema> schema;
    for (const auto& item : j) {
        ColumnSchema col;
        col.name = item.at("name").get<std::string>();
        col.kind = column_kind_from_string(item.at("kind").get<std::string>());
        if (item.contains("ordinal_order"))
            col.ordinal_order = item.at("ordinal_order").get<std::vector<std::string>>();
        schema.push_back(std::move(col));
    }
    validate_schema(schema);
    return schema;
}

std::vector<ColumnSchema> load_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open schema file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return schema_from_json_text(ss.str());
}

std::string schema_to_json_text(const std::vector<ColumnSchema>& schema) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& col : schema) {
        nlohmann::json item;
        item["name"] = col.name;
        item["kind"] = to_string(col.kind);
        if (col.kind == ColumnKind::ordinal) item["ordinal_order"] = col.ordinal_order;
        j.push_back(item);
    }
    return j.dump(2);
}

Table::Table(std::vector<ColumnSchema> schema, std::size_t n_rows)
    : schema_(std::move(schema)), n_rows_(n_rows) {
    validate_schema(schema_, /*require_target=*/false);
    nums_.resize(schema_.size());
    strs_.resize(schema_.size());
    missing_.resize(schema_.size());
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        missing_[c].assign(n_rows_, 0);
        if (schema_[c].kind == ColumnKind::nominal || schema_[c].kind == ColumnKind::ordinal)
            strs_[c].assign(n_rows_, std::string());
        else
            nums_[c].assign(n_rows_, 0.0);
    }
}

bool Table::row_has_missing(std::size_t row) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
        if (missing_[c][row]) return true;
    return false;
}

bool Table::has_missing() const {
    for (std::size_t r = 0; r < n_rows_; ++r)
        if (row_has_missing(r)) return true;
    return false;
}

void Table::set_num(std::size_t row, std::size_t col, double v) {
    nums_[col][row] = v;
    missing_[col][row] = 0;
}

void Table::set_str(std::size_t row, std::size_t col, std::string v) {
    strs_[col][row] = std::move(v);
    missing_[col][row] = 0;
}

void Table::set_missing(std::size_t row, std::size_t col) { missing_[col][row] = 1; }

std::size_t Table::target_index() const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
        if (schema_[c].kind == ColumnKind::target) return c;
    throw Error("table schema has no target column");
}

std::size_t Table::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < schema_.size(); ++c)
        if (schema_[c].name == name) return c;
    throw MissingColumn(name);
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
    Table out(schema_, rows.size());
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        const bool is_str =
            schema_[c].kind == ColumnKind::nominal || schema_[c].kind == ColumnKind::ordinal;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::size_t r = rows[i];
            out.missing_[c][i] = missing_[c][r];
            if (is_str)
                out.strs_[c][i] = strs_[c][r];
            else
                out.nums_[c][i] = nums_[c][r];
        }
    }
    return out;
}

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line where the record starts
};

// Streams the whole text into records, honoring quoted fields ("" escapes,
// embedded delimiters and newlines).
std::vector<CsvRecord> parse_csv_records(const std::string& text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&]() {
        current.fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        // skip records that are completely empty (blank lines)
        if (!(current.fields.size() == 1 && current.fields[0].empty()))
            records.push_back(std::move(current));
        current = CsvRecord{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field_started && field.empty()) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(ch); // stray quote mid-field, keep verbatim
                }
                break;
            case ',': end_field(); break;
            case '\r': break;
            case '\n':
                ++line;
                end_record();
                break;
            default:
                field.push_back(ch);
                field_started = true;
                break;
        }
    }
    if (in_quotes) throw MalformedCsv(current.line, "unterminated quoted field");
    if (field_started || !field.empty() || !current.fields.empty()) end_record();
    return records;
}

bool parse_double_cell(const std::string& s, double& out) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    if (b == e) return false;
    const char* first = s.data() + b;
    const char* last = s.data() + e;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

} // namespace

Table load_csv_text(const std::string& text, const std::vector<ColumnSchema>& schema) {
    validate_schema(schema, /*require_target=*/false);
    auto records = parse_csv_records(text);
    if (records.empty()) throw MalformedCsv(1, "no header row");

    const auto& header = records[0].fields;
    std::vector<std::size_t> csv_index(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
        auto it = std::find(header.begin(), header.end(), schema[c].name);
        if (it == header.end()) throw MissingColumn(schema[c].name);
        csv_index[c] = static_cast<std::size_t>(it - header.begin());
    }

    const std::size_t n_rows = records.size() - 1;
    Table table(schema, n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto& rec = records[r + 1];
        if (rec.fields.size() != header.size())
            throw MalformedCsv(rec.line, "expected " + std::to_string(header.size()) +
                                             " fields, got " + std::to_string(rec.fields.size()));
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string& cell = rec.fields[csv_index[c]];
            if (schema[c].kind == ColumnKind::nominal || schema[c].kind == ColumnKind::ordinal) {
                if (cell.empty())
                    table.set_missing(r, c);
                else
                    table.set_str(r, c, cell);
            } else {
                double v = 0.0;
                if (parse_double_cell(cell, v))
                    table.set_num(r, c, v);
                else
                    table.set_missing(r, c);
            }
        }
    }
    return table;
}

Table load_csv(const std::string& path, const std::vector<ColumnSchema>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_csv_text(ss.str(), schema);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += "\"";
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open CSV file for writing: " + path);
    const auto& schema = t.schema();
    for (std::size_t c = 0; c < schema.size(); ++c) {
        if (c) out << ',';
        out << csv_escape(schema[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t c = 0; c < schema.size(); ++c) {
            if (c) out << ',';
            if (t.is_missing(r, c)) continue;
            if (schema[c].kind == ColumnKind::nominal || schema[c].kind == ColumnKind::ordinal)
                out << csv_escape(t.str(r, c));
            else
                out << format_double(t.num(r, c));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing CSV file: " + path);
}

Table drop_null_rows(const Table& t) {
    std::vector<std::size_t> keep;
    keep.reserve(t.n_rows());
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        if (!t.row_has_missing(r)) keep.push_back(r);
    if (keep.empty()) throw EmptyResult("all rows contain missing values");
    return t.select_rows(keep);
}

CorrelationMatrix correlation_matrix(const Table& t) {
    if (t.n_rows() < 2) throw TooFewRows("correlation_matrix needs at least 2 rows");
    if (t.has_missing())
        throw Error("correlation_matrix requires a table without missing cells; "
                    "call drop_null_rows first");

    std::vector<std::size_t> cols;
    CorrelationMatrix result;
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        ColumnKind k = t.schema()[c].kind;
        if (k == ColumnKind::numeric || k == ColumnKind::target) {
            cols.push_back(c);
            result.names.push_back(t.schema()[c].name);
        }
    }

    const std::size_t n = t.n_rows();
    const std::size_t d = cols.size();
    std::vector<double> mean(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += t.num(r, cols[j]);
        mean[j] = s / static_cast<double>(n);
    }
    std::vector<double> sumsq(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double dx = t.num(r, cols[j]) - mean[j];
            s += dx * dx;
        }
        sumsq[j] = s;
    }

    result.values = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double r_ij = 0.0;
            if (sumsq[i] > 0.0 && sumsq[j] > 0.0) {
                double cov = 0.0;
                for (std::size_t r = 0; r < n; ++r)
                    cov += (t.num(r, cols[i]) - mean[i]) * (t.num(r, cols[j]) - mean[j]);
                r_ij = cov / std::sqrt(sumsq[i] * sumsq[j]);
            }
            result.values.at(i, j) = r_ij;
            result.values.at(j, i) = r_ij;
        }
    }
    return result;
}

std::pair<Table, Table> train_test_split(const Table& t, const SplitSpec& spec) {
    if (t.n_rows() < 2) throw TooFewRows("train_test_split needs at least 2 rows");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error("train_fraction must lie in (0,1)");

    const std::size_t n = t.n_rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (spec.shuffle) {
        Pcg32 rng(derive_stream(spec.seed, 0x73706c6974ull)); // "split" stream tag
        fisher_yates_shuffle(perm, rng);
    }
    const auto n_train =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    std::span<const std::size_t> all(perm);
    Table train = t.select_rows(all.subspan(0, n_train));
    Table test = t.select_rows(all.subspan(n_train));
    return {std::move(train), std::move(test)};
}

} // namespace emml
