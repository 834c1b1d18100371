#include "carfi/table.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace carfi {

void Table::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("table row width does not match the header");
  rows_.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  auto it = std::find(header_.begin(), header_.end(), name);
  if (it == header_.end()) throw std::out_of_range("no table column '" + name + "'");
  return static_cast<std::size_t>(it - header_.begin());
}

namespace {

void write_line(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    if (k) out << ',';
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    } else {
      out << c;
    }
  }
  out << '\n';
}

}  // namespace

void Table::write(std::ostream& out) const {
  for (const auto& c : comments_) out << "# " << c << '\n';
  write_line(out, header_);
  for (const auto& r : rows_) write_line(out, r);
}

void Table::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write(out);
}

std::string cell(double v) { return format_double(v); }
std::string cell(std::size_t v) { return std::to_string(v); }

Table report_table(const Schema& features, std::span<const ImportanceReport> reports, const Provenance& provenance) {
  std::vector<std::string> header{"method",  "features", "conditioning", "estimate", "loss_difference", "t",
                                  "p_value", "n_test",   "replicates",   "loss",     "seed",            "extrapolated"};
  for (const auto& [k, v] : provenance) header.push_back(k);
  Table t(std::move(header));
  for (const auto& r : reports) {
    std::vector<std::string> row{r.method == Method::CArfi ? "carfi" : "pfi",
                                 describe_columns(features, r.features),
                                 r.method == Method::Pfi ? "-" : describe_columns(features, r.conditioning),
                                 cell(r.estimate),
                                 cell(r.loss_difference()),
                                 cell(r.test.t),
                                 cell(r.test.p_value),
                                 cell(r.deltas.size()),
                                 cell(r.replicates),
                                 to_string(r.loss),
                                 std::to_string(r.seed),
                                 cell(r.extrapolated)};
    for (const auto& [k, v] : provenance) row.push_back(v);
    t.add(std::move(row));
  }
  return t;
}

}  // namespace carfi
