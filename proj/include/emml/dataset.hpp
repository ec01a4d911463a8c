#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emml/errors.hpp"
#include "emml/matrix.hpp"

namespace emml {

enum class ColumnKind { numeric, nominal, ordinal, target };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> ordinal_order; // required iff kind == ordinal
};

// Throws on duplicate names, bad ordinal orders, and (when require_target)
// anything other than exactly one target column.
void validate_schema(const std::vector<ColumnSchema>& schema, bool require_target = true);

// Schema config file: JSON array of {name, kind, ordinal_order?}.
std::vector<ColumnSchema> load_schema(const std::string& path);
std::vector<ColumnSchema> schema_from_json_text(const std::string& text);
std::string schema_to_json_text(const std::vector<ColumnSchema>& schema);

struct SplitSpec {
    double train_fraction = 0.9;
    std::uint64_t seed = 42;
    bool shuffle = true;
};

// Column-oriented table with a typed schema. Numeric and target columns hold
// doubles, nominal and ordinal columns hold strings; a per-cell mask marks
// missing values. Treat as immutable once built: every operation below is a
// pure function and safe to call concurrently on the same table.
class Table {
public:
    Table() = default;
    Table(std::vector<ColumnSchema> schema, std::size_t n_rows);

    const std::vector<ColumnSchema>& schema() const { return schema_; }
    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return schema_.size(); }

    bool is_missing(std::size_t row, std::size_t col) const { return missing_[col][row] != 0; }
    bool row_has_missing(std::size_t row) const;
    bool has_missing() const;

    double num(std::size_t row, std::size_t col) const { return nums_[col][row]; }
    const std::string& str(std::size_t row, std::size_t col) const { return strs_[col][row]; }

    void set_num(std::size_t row, std::size_t col, double v);
    void set_str(std::size_t row, std::size_t col, std::string v);
    void set_missing(std::size_t row, std::size_t col);

    // Index of the target column; throws Error if the schema has none.
    std::size_t target_index() const;
    std::size_t column_index(const std::string& name) const; // throws MissingColumn

    Table select_rows(std::span<const std::size_t> rows) const;

private:
    std::vector<ColumnSchema> schema_;
    std::size_t n_rows_ = 0;
    std::vector<std::vector<double>> nums_;
    std::vector<std::vector<std::string>> strs_;
    std::vector<std::vector<std::uint8_t>> missing_;
};

// RFC-4180-style CSV: first row header, UTF-8, comma delimiter, '.' decimal
// point, double quotes with "" escapes (embedded newlines allowed). Schema
// columns are matched to the header by name; extra CSV columns are ignored.
// Unparseable or empty cells get missing_mask=true.
Table load_csv(const std::string& path, const std::vector<ColumnSchema>& schema);
Table load_csv_text(const std::string& text, const std::vector<ColumnSchema>& schema);

void write_csv(const Table& t, const std::string& path);

// Keeps exactly the rows with no missing cells, in order. Throws EmptyResult
// if nothing survives.
Table drop_null_rows(const Table& t);

struct CorrelationMatrix {
    std::vector<std::string> names; // numeric + target columns, schema order
    Matrix values;                  // Pearson coefficients
};

// Pearson correlations over numeric+target columns. Entries touching a
// zero-variance column are 0 by convention (no NaNs).
CorrelationMatrix correlation_matrix(const Table& t);

// Deterministic split: round(train_fraction * n) rows go to train. Shuffle is
// a seeded Fisher-Yates permutation; identity order when shuffle=false.
std::pair<Table, Table> train_test_split(const Table& t, const SplitSpec& spec);

} // namespace emml
