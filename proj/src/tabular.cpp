#include "carfi/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "carfi/common.hpp"

namespace carfi {

// ---- FeatureKind / Schema -------------------------------------------------

FeatureKind FeatureKind::categorical(std::vector<std::string> levels) {
  if (levels.empty()) throw InputError("categorical feature needs at least one level");
  std::set<std::string> seen;
  for (const auto& l : levels) {
    if (!seen.insert(l).second) throw InputError("duplicate categorical level '" + l + "'");
  }
  FeatureKind kind;
  kind.levels_ = std::move(levels);
  return kind;
}

std::optional<std::size_t> FeatureKind::level_index(const std::string& label) const {
  auto it = std::find(levels_.begin(), levels_.end(), label);
  if (it == levels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - levels_.begin());
}

Schema::Schema(std::vector<Column> columns, std::optional<std::string> target)
    : columns_(std::move(columns)), target_(std::move(target)) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw InputError("empty column name");
    if (!names.insert(c.name).second) throw InputError("duplicate column name '" + c.name + "'");
  }
  if (target_ && !names.count(*target_)) throw InputError("target '" + *target_ + "' is not a column");
}

std::optional<std::size_t> Schema::find(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(const std::string& name) const {
  if (auto j = find(name)) return *j;
  throw InputError("unknown column '" + name + "'");
}

Schema Schema::with_target(std::optional<std::string> target) const {
  return Schema(columns_, std::move(target));
}

Schema Schema::without(std::size_t j) const {
  if (j >= columns_.size()) throw InputError("column index out of range");
  auto cols = columns_;
  const bool drops_target = target_ && *target_ == cols[j].name;
  cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
  return Schema(std::move(cols), drops_target ? std::nullopt : target_);
}

Schema Schema::select(std::span<const std::size_t> cols) const {
  std::vector<Column> out;
  bool keeps_target = false;
  for (auto j : cols) {
    if (j >= columns_.size()) throw InputError("column index out of range");
    out.push_back(columns_[j]);
    if (target_ && *target_ == columns_[j].name) keeps_target = true;
  }
  return Schema(std::move(out), keeps_target ? target_ : std::nullopt);
}

// ---- Dataset --------------------------------------------------------------

namespace {

void validate_cell(const Column& col, double v, std::size_t row) {
  if (col.kind.is_categorical()) {
    const double levels = static_cast<double>(col.kind.num_levels());
    if (!(v >= 0.0 && v < levels && v == std::floor(v))) {
      throw InputError("column '" + col.name + "' row " + std::to_string(row) + ": invalid level index");
    }
  } else if (!std::isfinite(v)) {
    throw InputError("column '" + col.name + "' row " + std::to_string(row) + ": non-finite value");
  }
}

}  // namespace

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.size()) throw InputError("column count does not match schema");
  if (columns_.empty()) throw InputError("dataset has no columns");
  num_rows_ = columns_.front().size();
  if (num_rows_ == 0) throw InputError("no rows");
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].size() != num_rows_) throw InputError("ragged columns");
    for (std::size_t i = 0; i < num_rows_; ++i) validate_cell(schema_.column(j), columns_[j][i], i);
  }
}

std::vector<double> Dataset::row(std::size_t i) const {
  std::vector<double> out(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) out[j] = columns_[j][i];
  return out;
}

std::vector<double> Dataset::row_major() const {
  const std::size_t p = columns_.size();
  std::vector<double> out(num_rows_ * p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < num_rows_; ++i) out[i * p + j] = columns_[j][i];
  }
  return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    cols[j].reserve(rows.size());
    for (auto i : rows) cols[j].push_back(columns_[j].at(i));
  }
  return Dataset(schema_, std::move(cols));
}

Dataset Dataset::select_cols(std::span<const std::size_t> cols) const {
  std::vector<std::vector<double>> out;
  for (auto j : cols) out.push_back(columns_.at(j));
  return Dataset(schema_.select(cols), std::move(out));
}

Dataset Dataset::drop_col(std::size_t j) const {
  auto cols = columns_;
  cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
  return Dataset(schema_.without(j), std::move(cols));
}

Dataset Dataset::replace_col(std::size_t j, std::vector<double> values) const {
  if (j >= columns_.size()) throw InputError("column index out of range");
  auto cols = columns_;
  cols[j] = std::move(values);
  return Dataset(schema_, std::move(cols));
}

Dataset Dataset::append_rows(const Dataset& other) const {
  if (!schema_.same_columns(other.schema_)) throw InputError("cannot append rows with a different schema");
  auto cols = columns_;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    cols[j].insert(cols[j].end(), other.columns_[j].begin(), other.columns_[j].end());
  }
  return Dataset(schema_, std::move(cols));
}

std::pair<Dataset, std::vector<double>> Dataset::split_target() const {
  if (!schema_.target()) throw InputError("dataset has no target column");
  const std::size_t t = schema_.index_of(*schema_.target());
  return {drop_col(t), columns_[t]};
}

// ---- Evidence -------------------------------------------------------------

Evidence::Evidence(const Schema& schema, std::vector<std::pair<std::size_t, double>> assignments)
    : assignments_(std::move(assignments)) {
  std::sort(assignments_.begin(), assignments_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < assignments_.size(); ++k) {
    const auto [col, value] = assignments_[k];
    if (col >= schema.size()) throw InputError("evidence column out of range");
    if (k > 0 && assignments_[k - 1].first == col) throw InputError("duplicate evidence column");
    validate_cell(schema.column(col), value, 0);
  }
}

Evidence Evidence::from_row(const Schema& schema, std::span<const double> row, std::span<const std::size_t> cols) {
  std::vector<std::pair<std::size_t, double>> a;
  a.reserve(cols.size());
  for (auto j : cols) a.emplace_back(j, row[j]);
  return Evidence(schema, std::move(a));
}

bool Evidence::contains(std::size_t col) const {
  return std::any_of(assignments_.begin(), assignments_.end(), [&](const auto& a) { return a.first == col; });
}

Evidence Evidence::merged(const Evidence& other) const {
  Evidence out;
  out.assignments_ = assignments_;
  for (const auto& a : other.assignments_) {
    if (contains(a.first)) throw InputError("evidence sets overlap");
    out.assignments_.push_back(a);
  }
  std::sort(out.assignments_.begin(), out.assignments_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

// ---- CSV ------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan"; }

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::optional<Schema>& schema_hint) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV: missing header row");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::vector<std::vector<std::string>> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("ragged row at line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    for (auto& c : cells) c = trim(c);
    raw.push_back(std::move(cells));
  }
  if (raw.empty()) throw InputError("no rows");

  const std::size_t p = header.size();
  std::vector<std::vector<double>> columns(p, std::vector<double>(raw.size()));
  std::vector<Column> schema_cols;

  if (schema_hint) {
    if (schema_hint->size() != p) throw InputError("schema has a different number of columns than the CSV header");
    for (std::size_t j = 0; j < p; ++j) {
      if (schema_hint->column(j).name != header[j]) {
        throw InputError("schema column '" + schema_hint->column(j).name + "' does not match header '" + header[j] + "'");
      }
    }
    schema_cols = schema_hint->columns();
  }

  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (is_missing(raw[i][j])) {
        throw InputError("missing value in column '" + header[j] + "' row " + std::to_string(i + 1));
      }
    }
    bool continuous;
    if (schema_hint) {
      continuous = schema_cols[j].kind.is_continuous();
    } else {
      continuous = std::all_of(raw.begin(), raw.end(), [&](const auto& r) { return parse_number(r[j]).has_value(); });
    }
    if (continuous) {
      for (std::size_t i = 0; i < raw.size(); ++i) {
        auto v = parse_number(raw[i][j]);
        if (!v) throw InputError("unparseable number '" + raw[i][j] + "' in column '" + header[j] + "'");
        if (!std::isfinite(*v)) throw InputError("non-finite value in column '" + header[j] + "'");
        columns[j][i] = *v;
      }
      if (!schema_hint) schema_cols.push_back({header[j], FeatureKind::continuous()});
    } else if (schema_hint) {
      const auto& kind = schema_cols[j].kind;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        auto idx = kind.level_index(raw[i][j]);
        if (!idx) throw InputError("unknown level '" + raw[i][j] + "' in column '" + header[j] + "'");
        columns[j][i] = static_cast<double>(*idx);
      }
    } else {
      std::vector<std::string> levels;
      std::unordered_map<std::string, std::size_t> index;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = index.emplace(raw[i][j], levels.size());
        if (inserted) levels.push_back(raw[i][j]);
        columns[j][i] = static_cast<double>(it->second);
      }
      schema_cols.push_back({header[j], FeatureKind::categorical(std::move(levels))});
    }
  }
  return Dataset(Schema(std::move(schema_cols), schema_hint ? schema_hint->target() : std::nullopt), std::move(columns));
}

Dataset read_csv(const std::filesystem::path& path, const std::optional<Schema>& schema_hint) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_csv(in, schema_hint);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(const Dataset& data, std::ostream& out) {
  const auto& schema = data.schema();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    out << (j ? "," : "") << quote_if_needed(schema.column(j).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (j) out << ',';
      const auto& kind = schema.column(j).kind;
      if (kind.is_categorical()) {
        out << quote_if_needed(kind.levels()[static_cast<std::size_t>(data.at(i, j))]);
      } else {
        out << format_double(data.at(i, j));
      }
    }
    out << '\n';
  }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_csv(data, out);
}

Schema parse_schema(std::istream& in) {
  std::vector<Column> cols;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto c1 = line.find(':');
    if (c1 == std::string::npos) throw InputError("schema line without kind: '" + line + "'");
    const std::string name = trim(line.substr(0, c1));
    const auto c2 = line.find(':', c1 + 1);
    const std::string kind = trim(line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    if (kind == "continuous") {
      if (c2 != std::string::npos) throw InputError("continuous column '" + name + "' cannot list levels");
      cols.push_back({name, FeatureKind::continuous()});
    } else if (kind == "categorical") {
      if (c2 == std::string::npos) throw InputError("categorical column '" + name + "' needs levels");
      std::vector<std::string> levels;
      std::stringstream ls(line.substr(c2 + 1));
      std::string level;
      while (std::getline(ls, level, '|')) levels.push_back(trim(level));
      cols.push_back({name, FeatureKind::categorical(std::move(levels))});
    } else {
      throw InputError("unknown column kind '" + kind + "'");
    }
  }
  return Schema(std::move(cols));
}

Schema read_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return parse_schema(in);
}

void write_schema(const Schema& schema, std::ostream& out) {
  for (const auto& c : schema.columns()) {
    out << c.name << ':' << (c.kind.is_categorical() ? "categorical" : "continuous");
    if (c.kind.is_categorical()) {
      out << ':';
      for (std::size_t k = 0; k < c.kind.num_levels(); ++k) out << (k ? "|" : "") << c.kind.levels()[k];
    }
    out << '\n';
  }
}

// ---- randomized operations ------------------------------------------------

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
  const std::size_t n = data.num_rows();
  if (n < 2) throw InputError("split needs at least two rows");
  const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) throw InputError("split would leave one side empty");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed));
  for (std::size_t k = n - 1; k > 0; --k) std::swap(idx[k], idx[uniform_index(rng, k + 1)]);

  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.select_rows(train), data.select_rows(test)};
}

Dataset permute_column(const Dataset& data, std::size_t j, std::uint64_t seed) {
  if (j >= data.num_cols()) throw InputError("column index out of range");
  std::vector<double> values(data.column(j).begin(), data.column(j).end());
  Rng rng(derive_seed(seed));
  for (std::size_t k = values.size() - 1; k > 0; --k) std::swap(values[k], values[uniform_index(rng, k + 1)]);
  return data.replace_col(j, std::move(values));
}

// ---- encodings ------------------------------------------------------------

std::size_t encoded_width(const Schema& features, Encoding encoding) {
  std::size_t w = 0;
  for (const auto& c : features.columns()) {
    w += (encoding == Encoding::OneHot && c.kind.is_categorical()) ? c.kind.num_levels() - 1 : 1;
  }
  return w;
}

void encode_row(const Schema& features, Encoding encoding, std::span<const double> row, std::span<double> out) {
  std::size_t k = 0;
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto& kind = features.column(j).kind;
    if (encoding == Encoding::OneHot && kind.is_categorical()) {
      const auto level = static_cast<std::size_t>(row[j]);
      for (std::size_t l = 1; l < kind.num_levels(); ++l) out[k++] = (level == l) ? 1.0 : 0.0;
    } else {
      out[k++] = row[j];
    }
  }
}

EncodedMatrix encode(const Dataset& features, Encoding encoding) {
  EncodedMatrix m;
  const auto& schema = features.schema();
  for (const auto& c : schema.columns()) {
    if (encoding == Encoding::OneHot && c.kind.is_categorical()) {
      for (std::size_t l = 1; l < c.kind.num_levels(); ++l) m.names.push_back(c.name + "=" + c.kind.levels()[l]);
    } else {
      m.names.push_back(c.name);
    }
  }
  m.rows = features.num_rows();
  const std::size_t w = m.names.size();
  m.values.resize(m.rows * w);
  std::vector<double> row(schema.size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < schema.size(); ++j) row[j] = features.at(i, j);
    encode_row(schema, encoding, row, std::span<double>(m.values).subspan(i * w, w));
  }
  return m;
}

}  // namespace carfi
