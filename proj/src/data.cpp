#include "ivpile/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ivpile/rng.hpp"

namespace ivpile {

namespace {

bool is_pm_one(double v) { return v == 1.0 || v == -1.0; }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim whitespace and a possible trailing \r
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    if (std::isnan(v)) throw std::invalid_argument("NaN");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv parse error at row " + std::to_string(row) +
                             ", column '" + col + "': '" + cell + "'");
  }
}

}  // namespace

void ObservationTable::validate() const {
  const Eigen::Index rows = x.rows();
  if (rows < 1 || x.cols() < 1)
    throw std::invalid_argument("table must have n >= 1 rows and d >= 1 columns");
  if (z.size() != rows || a.size() != rows || y.size() != rows)
    throw std::invalid_argument("x, z, a, y must have the same number of rows");
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!is_pm_one(z[i]))
      throw std::invalid_argument("z must be -1 or +1 (row " + std::to_string(i) + ")");
    if (!is_pm_one(a[i]))
      throw std::invalid_argument("a must be -1 or +1 (row " + std::to_string(i) + ")");
    if (outcome_kind == OutcomeKind::Binary) {
      if (!is_pm_one(y[i]))
        throw std::invalid_argument("binary y must be -1 or +1 (row " +
                                    std::to_string(i) + ")");
    } else {
      if (!(y[i] >= k0 && y[i] <= k1))
        throw std::invalid_argument("y out of [k0, k1] (row " + std::to_string(i) + ")");
    }
  }
  if (outcome_kind == OutcomeKind::BoundedContinuous && !(k0 < k1))
    throw std::invalid_argument("bounded outcome requires k0 < k1");
}

ObservationTable ObservationTable::subset(
    const std::vector<Eigen::Index>& rows) const {
  ObservationTable out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.z.resize(static_cast<Eigen::Index>(rows.size()));
  out.a.resize(static_cast<Eigen::Index>(rows.size()));
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    out.z[static_cast<Eigen::Index>(i)] = z[rows[i]];
    out.a[static_cast<Eigen::Index>(i)] = a[rows[i]];
    out.y[static_cast<Eigen::Index>(i)] = y[rows[i]];
  }
  out.outcome_kind = outcome_kind;
  out.k0 = k0;
  out.k1 = k1;
  return out;
}

ObservationTable load_csv(const std::string& path, const CsvSchema& schema,
                          OutcomeKind outcome_kind, double k0, double k1) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv file: " + path);
  const std::vector<std::string> header = split_line(line);

  auto find_col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("csv schema error: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t zi = find_col(schema.z_col);
  const std::size_t ai = find_col(schema.a_col);
  const std::size_t yi = find_col(schema.y_col);

  std::vector<std::size_t> xcols;
  if (schema.x_cols.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != zi && c != ai && c != yi) xcols.push_back(c);
  } else {
    for (const auto& name : schema.x_cols) xcols.push_back(find_col(name));
  }
  if (xcols.empty()) throw std::runtime_error("csv schema error: no covariate columns");

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("csv parse error at row " + std::to_string(row_no) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, got " + std::to_string(cells.size()));
    std::vector<double> parsed(header.size());
    for (std::size_t c = 0; c < header.size(); ++c)
      parsed[c] = parse_cell(cells[c], row_no, header[c]);
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) throw std::runtime_error("csv has no data rows: " + path);

  ObservationTable table;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  table.x.resize(n, static_cast<Eigen::Index>(xcols.size()));
  table.z.resize(n);
  table.a.resize(n);
  table.y.resize(n);
  auto remap = [&](double v) {
    if (schema.remap_zero_one && v == 0.0) return -1.0;
    return v;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < xcols.size(); ++c)
      table.x(i, static_cast<Eigen::Index>(c)) = rows[i][xcols[c]];
    table.z[i] = remap(rows[i][zi]);
    table.a[i] = remap(rows[i][ai]);
    table.y[i] = rows[i][yi];
    if (!is_pm_one(table.z[i]))
      throw std::runtime_error("domain error at row " + std::to_string(i + 1) +
                               ": z must be -1 or +1");
    if (!is_pm_one(table.a[i]))
      throw std::runtime_error("domain error at row " + std::to_string(i + 1) +
                               ": a must be -1 or +1");
  }
  table.outcome_kind = outcome_kind;
  table.k0 = k0;
  table.k1 = k1;
  table.validate();
  return table;
}

void save_csv(const std::string& path, const ObservationTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file: " + path);
  for (Eigen::Index c = 0; c < table.dim(); ++c) out << "x" << (c + 1) << ",";
  out << "z,a,y\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out << buf;
  };
  for (Eigen::Index i = 0; i < table.n(); ++i) {
    for (Eigen::Index c = 0; c < table.dim(); ++c) put(table.x(i, c), ',');
    put(table.z[i], ',');
    put(table.a[i], ',');
    put(table.y[i], '\n');
  }
}

SplitResult split(const ObservationTable& table, double test_fraction,
                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  if (table.n() < 2) throw std::invalid_argument("split requires n >= 2");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(table.n()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  rng.shuffle(idx);
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(table.n()) * test_fraction));
  std::vector<Eigen::Index> test_rows(idx.begin(), idx.begin() + n_test);
  std::vector<Eigen::Index> train_rows(idx.begin() + n_test, idx.end());
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());
  return {table.subset(train_rows), table.subset(test_rows)};
}

std::vector<Eigen::Index> FoldAssignment::fold_rows(int fold) const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<Eigen::Index> FoldAssignment::out_of_fold_rows(int fold) const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) rows.push_back(i);
  return rows;
}

FoldAssignment make_folds(const ObservationTable& table, int k,
                          std::uint64_t seed) {
  const Eigen::Index n = table.n();
  if (k < 2 || static_cast<Eigen::Index>(k) > n)
    throw std::invalid_argument("make_folds requires 2 <= k <= n");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  rng.shuffle(idx);
  FoldAssignment out;
  out.k = k;
  out.fold_of.resize(n);
  for (std::size_t pos = 0; pos < idx.size(); ++pos)
    out.fold_of[idx[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return out;
}

}  // namespace ivpile
