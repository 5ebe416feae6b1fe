#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gmclust/errors.hpp"

namespace gmclust {

/// Encoded n-by-q table of categorical observations. Column j takes codes in
/// [0, levels(j)) assigned by sorted label order; a missing-value token, when
/// configured, becomes one extra level appended after the sorted labels.
/// Immutable after construction.
class CategoricalDataset {
 public:
  CategoricalDataset(std::vector<std::string> names,
                     std::vector<std::vector<std::string>> labels,
                     std::vector<int> codes)
      : names_(std::move(names)), labels_(std::move(labels)), codes_(std::move(codes)) {
    q_ = static_cast<int>(labels_.size());
    levels_.reserve(q_);
    for (const auto& ls : labels_) levels_.push_back(static_cast<int>(ls.size()));
    if (q_ < 1) throw data_error("dataset must have at least one variable");
    if (names_.size() != static_cast<std::size_t>(q_))
      throw data_error("variable name count does not match column count");
    if (codes_.size() % q_ != 0) throw data_error("code matrix is not rectangular");
    n_ = static_cast<long>(codes_.size()) / q_;
    if (n_ < 1) throw data_error("dataset must have at least one row");
    for (int j = 0; j < q_; ++j) {
      if (levels_[j] < 2)
        throw data_error("variable '" + names_[j] + "' has fewer than two levels");
      std::set<std::string> distinct(labels_[j].begin(), labels_[j].end());
      if (distinct.size() != labels_[j].size())
        throw data_error("variable '" + names_[j] + "' has duplicate level labels");
    }
    for (long i = 0; i < n_; ++i)
      for (int j = 0; j < q_; ++j) {
        const int c = code(i, j);
        if (c < 0 || c >= levels_[j])
          throw data_error("code out of range at row " + std::to_string(i) + ", variable '" +
                           names_[j] + "'");
      }
  }

  /// Builds a dataset from raw rows of codes; labels default to "0","1",...
  static CategoricalDataset from_codes(const std::vector<std::vector<int>>& rows,
                                       const std::vector<int>& levels) {
    const int q = static_cast<int>(levels.size());
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> labels(q);
    for (int j = 0; j < q; ++j) {
      names.push_back("V" + std::to_string(j + 1));
      for (int l = 0; l < levels[j]; ++l) labels[j].push_back(std::to_string(l));
    }
    std::vector<int> codes;
    codes.reserve(rows.size() * q);
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != q) throw data_error("row width does not match q");
      codes.insert(codes.end(), r.begin(), r.end());
    }
    return CategoricalDataset(std::move(names), std::move(labels), std::move(codes));
  }

  long n() const { return n_; }
  int q() const { return q_; }
  int levels(int j) const { return levels_.at(j); }
  const std::vector<int>& level_vector() const { return levels_; }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<std::string>& level_labels(int j) const { return labels_.at(j); }

  int code(long i, long j) const { return codes_[i * q_ + j]; }
  std::span<const int> row(long i) const { return {codes_.data() + i * q_, static_cast<std::size_t>(q_)}; }
  const std::string& decode(long i, int j) const { return labels_[j][code(i, j)]; }

  /// Sub-dataset restricted to the given columns, in the given order.
  CategoricalDataset select_columns(const std::vector<int>& cols) const {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> labels;
    for (int j : cols) {
      if (j < 0 || j >= q_) throw std::out_of_range("column index out of range");
      names.push_back(names_[j]);
      labels.push_back(labels_[j]);
    }
    std::vector<int> codes;
    codes.reserve(n_ * cols.size());
    for (long i = 0; i < n_; ++i)
      for (int j : cols) codes.push_back(code(i, j));
    return CategoricalDataset(std::move(names), std::move(labels), std::move(codes));
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> labels_;
  std::vector<int> codes_;  // row-major n*q
  std::vector<int> levels_;
  long n_ = 0;
  int q_ = 0;
};

namespace detail {

/// Splits one RFC-4180 record. Handles quoted fields with embedded commas and
/// doubled quotes; trailing CR is stripped by the caller.
inline std::vector<std::string> split_csv_record(const std::string& line, long row_for_errors) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t p = 0; p < line.size(); ++p) {
    const char ch = line[p];
    if (quoted) {
      if (ch == '"') {
        if (p + 1 < line.size() && line[p + 1] == '"') {
          cur.push_back('"');
          ++p;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted)
    throw data_error("unterminated quoted field at row " + std::to_string(row_for_errors));
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace detail

/// Reads a comma-separated file whose first row names the q variables. Level
/// sets are the sorted distinct strings per column; when missing_token is set,
/// cells equal to it map to a dedicated level appended after the sorted ones
/// (only in columns where the token occurs).
inline CategoricalDataset load_csv(const std::string& path,
                                   std::optional<std::string> missing_token = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path);

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw data_error("empty file: " + path);

  const std::vector<std::string> names = detail::split_csv_record(lines[0], 0);
  const int q = static_cast<int>(names.size());
  const long n = static_cast<long>(lines.size()) - 1;
  if (n < 1) throw data_error("no data rows in " + path);

  std::vector<std::vector<std::string>> cells(n);
  for (long i = 0; i < n; ++i) {
    cells[i] = detail::split_csv_record(lines[i + 1], i + 1);
    if (static_cast<int>(cells[i].size()) != q)
      throw data_error("row " + std::to_string(i + 1) + " has " +
                       std::to_string(cells[i].size()) + " cells, expected " + std::to_string(q));
  }

  std::vector<std::vector<std::string>> labels(q);
  std::vector<std::map<std::string, int>> code_of(q);
  for (int j = 0; j < q; ++j) {
    std::set<std::string> distinct;
    bool has_missing = false;
    for (long i = 0; i < n; ++i) {
      if (missing_token && cells[i][j] == *missing_token)
        has_missing = true;
      else
        distinct.insert(cells[i][j]);
    }
    labels[j].assign(distinct.begin(), distinct.end());
    if (has_missing) labels[j].push_back(*missing_token);
    if (labels[j].size() < 2)
      throw data_error("variable '" + names[j] + "' has a single distinct level");
    for (int l = 0; l < static_cast<int>(labels[j].size()); ++l) code_of[j][labels[j][l]] = l;
  }

  std::vector<int> codes;
  codes.reserve(n * q);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) codes.push_back(code_of[j][cells[i][j]]);

  return CategoricalDataset(std::move(names), std::move(labels), std::move(codes));
}

/// Sparse table of marginal configuration counts over a variable subset S.
/// Keys are configurations packed in mixed radix; unobserved cells read as 0.
/// The empty subset is the one-cell table whose count equals the total.
class MarginalCountTable {
 public:
  MarginalCountTable(std::vector<int> subset, std::vector<int> subset_levels)
      : subset_(std::move(subset)), levels_(std::move(subset_levels)) {
    if (subset_.size() != levels_.size())
      throw data_error("subset/levels size mismatch in count table");
    strides_.resize(subset_.size());
    std::uint64_t stride = 1;
    cell_space_ = 1.0;
    for (std::size_t t = 0; t < subset_.size(); ++t) {
      strides_[t] = stride;
      const std::uint64_t l = static_cast<std::uint64_t>(levels_[t]);
      if (l == 0 || stride > std::numeric_limits<std::uint64_t>::max() / l)
        throw numeric_error("configuration space too large to index");
      stride *= l;
      cell_space_ *= static_cast<double>(levels_[t]);
    }
  }

  const std::vector<int>& subset() const { return subset_; }
  const std::vector<int>& subset_levels() const { return levels_; }
  long total() const { return total_; }
  /// Number of cells |X_S| of the marginal table (1 for the empty subset).
  double cell_space() const { return cell_space_; }
  std::size_t observed_cells() const { return counts_.size(); }

  void add_row(std::span<const int> full_row) {
    ++counts_[pack_row(full_row)];
    ++total_;
  }

  void remove_row(std::span<const int> full_row) {
    const auto it = counts_.find(pack_row(full_row));
    if (it == counts_.end() || it->second <= 0)
      throw numeric_error("removing a configuration with zero count");
    if (--it->second == 0) counts_.erase(it);
    --total_;
  }

  long count_row(std::span<const int> full_row) const {
    const auto it = counts_.find(pack_row(full_row));
    return it == counts_.end() ? 0 : it->second;
  }

  /// Count of a configuration given as values aligned with the subset.
  long count_tuple(std::span<const int> values) const {
    const auto it = counts_.find(pack_tuple(values));
    return it == counts_.end() ? 0 : it->second;
  }

  template <typename F>
  void for_each_observed(F&& f) const {
    for (const auto& [key, cnt] : counts_) f(cnt);
  }

  /// Observed (configuration, count) pairs sorted by configuration.
  std::vector<std::pair<std::vector<int>, long>> items() const {
    std::vector<std::pair<std::uint64_t, long>> packed(counts_.begin(), counts_.end());
    std::sort(packed.begin(), packed.end());
    std::vector<std::pair<std::vector<int>, long>> out;
    out.reserve(packed.size());
    for (const auto& [key, cnt] : packed) out.emplace_back(unpack(key), cnt);
    return out;
  }

  bool same_counts(const MarginalCountTable& other) const {
    return subset_ == other.subset_ && total_ == other.total_ && counts_ == other.counts_;
  }

 private:
  std::uint64_t pack_row(std::span<const int> full_row) const {
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < subset_.size(); ++t)
      key += strides_[t] * static_cast<std::uint64_t>(full_row[subset_[t]]);
    return key;
  }

  std::uint64_t pack_tuple(std::span<const int> values) const {
    if (values.size() != subset_.size())
      throw std::out_of_range("tuple width does not match subset size");
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < subset_.size(); ++t) {
      if (values[t] < 0 || values[t] >= levels_[t])
        throw std::out_of_range("configuration value out of range");
      key += strides_[t] * static_cast<std::uint64_t>(values[t]);
    }
    return key;
  }

  std::vector<int> unpack(std::uint64_t key) const {
    std::vector<int> values(subset_.size());
    for (std::size_t t = 0; t < subset_.size(); ++t)
      values[t] = static_cast<int>((key / strides_[t]) % static_cast<std::uint64_t>(levels_[t]));
    return values;
  }

  std::vector<int> subset_;
  std::vector<int> levels_;
  std::vector<std::uint64_t> strides_;
  std::unordered_map<std::uint64_t, long> counts_;
  long total_ = 0;
  double cell_space_ = 1.0;
};

/// Tallies the configurations of `subset` over the selected rows. The subset
/// must be sorted and duplicate-free; the empty subset yields a single cell
/// holding |rows|.
inline MarginalCountTable marginal_counts(const CategoricalDataset& data,
                                          std::span<const long> rows,
                                          const std::vector<int>& subset) {
  std::vector<int> subset_levels;
  for (std::size_t t = 0; t < subset.size(); ++t) {
    const int j = subset[t];
    if (j < 0 || j >= data.q()) throw std::out_of_range("variable index out of range");
    if (t > 0 && subset[t - 1] >= j)
      throw std::out_of_range("subset must be sorted and duplicate-free");
    subset_levels.push_back(data.levels(j));
  }
  MarginalCountTable table(subset, std::move(subset_levels));
  for (long i : rows) {
    if (i < 0 || i >= data.n()) throw std::out_of_range("row index out of range");
    table.add_row(data.row(i));
  }
  return table;
}

inline std::vector<long> all_rows(const CategoricalDataset& data) {
  std::vector<long> rows(data.n());
  for (long i = 0; i < data.n(); ++i) rows[i] = i;
  return rows;
}

}  // namespace gmclust
