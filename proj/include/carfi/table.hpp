#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "carfi/importance.hpp"

namespace carfi {

// Comma-separated result table; comment lines are written first, prefixed
// with "# ".
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row);
  void comment(std::string line) { comments_.push_back(std::move(line)); }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t column(const std::string& name) const;

  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> comments_;
};

std::string cell(double v);
std::string cell(std::size_t v);

using Provenance = std::vector<std::pair<std::string, std::string>>;

// One row per report; provenance pairs become trailing constant columns.
Table report_table(const Schema& features, std::span<const ImportanceReport> reports, const Provenance& provenance);

}  // namespace carfi
