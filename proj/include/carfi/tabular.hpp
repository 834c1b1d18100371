#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace carfi {

// Column type: a real-valued feature or a categorical one with an ordered
// list of distinct level labels. Categorical cells hold the level index.
class FeatureKind {
 public:
  static FeatureKind continuous() { return FeatureKind(); }
  static FeatureKind categorical(std::vector<std::string> levels);

  bool is_continuous() const { return levels_.empty(); }
  bool is_categorical() const { return !levels_.empty(); }
  const std::vector<std::string>& levels() const { return levels_; }
  std::size_t num_levels() const { return levels_.size(); }

  // Index of a level label, or nullopt when absent.
  std::optional<std::size_t> level_index(const std::string& label) const;

  friend bool operator==(const FeatureKind&, const FeatureKind&) = default;

 private:
  FeatureKind() = default;
  std::vector<std::string> levels_;
};

struct Column {
  std::string name;
  FeatureKind kind;
  friend bool operator==(const Column&, const Column&) = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> columns, std::optional<std::string> target = std::nullopt);

  std::size_t size() const { return columns_.size(); }
  const Column& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<Column>& columns() const { return columns_; }
  const std::optional<std::string>& target() const { return target_; }

  std::optional<std::size_t> find(const std::string& name) const;
  // Throws InputError naming the unknown column.
  std::size_t index_of(const std::string& name) const;

  Schema with_target(std::optional<std::string> target) const;
  Schema without(std::size_t j) const;
  Schema select(std::span<const std::size_t> cols) const;

  // Same columns (names and kinds) in the same order; target is ignored.
  bool same_columns(const Schema& other) const { return columns_ == other.columns_; }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Column> columns_;
  std::optional<std::string> target_;
};

// Immutable column-major table. Continuous cells are finite doubles,
// categorical cells are level indices stored as doubles.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<std::vector<double>> columns);

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return num_rows_; }
  std::size_t num_cols() const { return columns_.size(); }

  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::span<const double> column(std::size_t j) const { return columns_.at(j); }
  std::vector<double> row(std::size_t i) const;

  // Row-major copy (num_rows x num_cols).
  std::vector<double> row_major() const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
  Dataset select_cols(std::span<const std::size_t> cols) const;
  Dataset drop_col(std::size_t j) const;
  Dataset replace_col(std::size_t j, std::vector<double> values) const;
  // Rows of `other` appended below; schemas must have identical columns.
  Dataset append_rows(const Dataset& other) const;

  // Features-only view (target column removed) and the target values.
  // Throws when the schema has no target.
  std::pair<Dataset, std::vector<double>> split_target() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t num_rows_ = 0;
};

// Partial assignment of feature values: the conditioning set with its
// observed values. Kept sorted by column index.
class Evidence {
 public:
  Evidence() = default;
  Evidence(const Schema& schema, std::vector<std::pair<std::size_t, double>> assignments);

  // Evidence from the values of `row` on columns `cols`.
  static Evidence from_row(const Schema& schema, std::span<const double> row,
                           std::span<const std::size_t> cols);

  bool empty() const { return assignments_.empty(); }
  std::size_t size() const { return assignments_.size(); }
  const std::vector<std::pair<std::size_t, double>>& assignments() const { return assignments_; }
  bool contains(std::size_t col) const;

  // Union with disjoint evidence.
  Evidence merged(const Evidence& other) const;

 private:
  std::vector<std::pair<std::size_t, double>> assignments_;
};

// ---- ingestion / output ---------------------------------------------------

Dataset read_csv(const std::filesystem::path& path, const std::optional<Schema>& schema_hint = std::nullopt);
Dataset parse_csv(std::istream& in, const std::optional<Schema>& schema_hint = std::nullopt);

void write_csv(const Dataset& data, const std::filesystem::path& path);
void write_csv(const Dataset& data, std::ostream& out);

// Schema file: one `name:kind[:level1|level2|...]` line per column, kind in
// {continuous, categorical}. Blank lines and lines starting with '#' skipped.
Schema read_schema(const std::filesystem::path& path);
Schema parse_schema(std::istream& in);
void write_schema(const Schema& schema, std::ostream& out);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// ---- randomized operations ------------------------------------------------

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);
Dataset permute_column(const Dataset& data, std::size_t j, std::uint64_t seed);

// Design-matrix encodings of the features for learners.
enum class Encoding { LabelIndex, OneHot };

struct EncodedMatrix {
  std::vector<std::string> names;
  std::vector<double> values;  // row-major, rows x names.size()
  std::size_t rows = 0;
};

// OneHot drops the first level of every categorical column.
EncodedMatrix encode(const Dataset& features, Encoding encoding);
std::size_t encoded_width(const Schema& features, Encoding encoding);
void encode_row(const Schema& features, Encoding encoding, std::span<const double> row, std::span<double> out);

}  // namespace carfi
