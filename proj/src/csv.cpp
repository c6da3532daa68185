#include "underreport/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace underreport {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, long row, const std::string& column) {
  std::string s = trim(raw);
  if (s.empty()) {
    throw CsvError("blank cell at row " + std::to_string(row) + ", column '" +
                   column + "'");
  }
  double value = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size() ||
      !std::isfinite(value)) {
    throw CsvError("cell '" + s + "' at row " + std::to_string(row) +
                   ", column '" + column + "' is not a finite number");
  }
  return value;
}

int parse_binary_cell(const std::string& raw, long row,
                      const std::string& column) {
  double v = parse_cell(raw, row, column);
  if (v != 0.0 && v != 1.0) {
    throw CsvError("column '" + column + "' must be 0 or 1, got '" +
                   trim(raw) + "' at row " + std::to_string(row));
  }
  return v == 1.0 ? 1 : 0;
}

}  // namespace

InputTable parse_input_csv(const std::string& text,
                           const std::vector<std::string>& covariate_override) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw CsvError("empty input: no header row");

  std::vector<std::string> header = split_line(lines[0]);
  for (auto& h : header) h = trim(h);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1L : it - header.begin();
  };
  long y_col = column_of("y");
  long a_col = column_of("a_obs");
  long a2_col = column_of("a_obs2");
  long truth_col = column_of("a_true");
  if (y_col < 0) throw CsvError("missing required column 'y'");
  if (a_col < 0) throw CsvError("missing required column 'a_obs'");

  std::vector<long> cov_cols;
  std::vector<std::string> cov_names;
  if (covariate_override.empty()) {
    for (long c = 0; c < static_cast<long>(header.size()); ++c) {
      if (c == y_col || c == a_col || c == a2_col || c == truth_col) continue;
      if (header[static_cast<std::size_t>(c)].empty()) {
        throw CsvError("unnamed column at position " + std::to_string(c + 1));
      }
      cov_cols.push_back(c);
      cov_names.push_back(header[static_cast<std::size_t>(c)]);
    }
  } else {
    for (const auto& name : covariate_override) {
      if (name == "y" || name == "a_obs" || name == "a_obs2" || name == "a_true") {
        throw CsvError("'" + name + "' is reserved and cannot be a covariate");
      }
      long c = column_of(name);
      if (c < 0) throw CsvError("covariate column '" + name + "' not found");
      cov_cols.push_back(c);
      cov_names.push_back(name);
    }
  }

  long n = static_cast<long>(lines.size()) - 1;
  if (n < 1) throw CsvError("no data rows");

  InputTable table;
  auto d = static_cast<Eigen::Index>(cov_cols.size());
  table.data.x.resize(n, d);
  table.data.y.resize(n);
  table.data.a_obs.resize(n);
  if (a2_col >= 0) table.data.a_obs2.emplace(n);
  if (truth_col >= 0) {
    table.has_a_true = true;
    table.a_true.resize(n);
  }
  table.covariate_names = cov_names;

  for (long i = 0; i < n; ++i) {
    const std::string& raw = lines[static_cast<std::size_t>(i + 1)];
    std::vector<std::string> cells = split_line(raw);
    if (cells.size() != header.size()) {
      throw CsvError("row " + std::to_string(i + 1) + " has " +
                     std::to_string(cells.size()) + " cells, header has " +
                     std::to_string(header.size()));
    }
    long row = i + 1;
    table.data.y[i] =
        parse_binary_cell(cells[static_cast<std::size_t>(y_col)], row, "y");
    table.data.a_obs[i] =
        parse_binary_cell(cells[static_cast<std::size_t>(a_col)], row, "a_obs");
    if (a2_col >= 0) {
      (*table.data.a_obs2)[i] = parse_binary_cell(
          cells[static_cast<std::size_t>(a2_col)], row, "a_obs2");
    }
    if (truth_col >= 0) {
      table.a_true[i] = parse_binary_cell(
          cells[static_cast<std::size_t>(truth_col)], row, "a_true");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      table.data.x(i, j) =
          parse_cell(cells[static_cast<std::size_t>(cov_cols[static_cast<std::size_t>(j)])],
                     row, cov_names[static_cast<std::size_t>(j)]);
    }
  }
  return table;
}

InputTable read_input_csv(const std::string& path,
                          const std::vector<std::string>& covariate_override) {
  return parse_input_csv(read_file(path), covariate_override);
}

std::string format_dataset_csv(const Dataset& data, const BinaryVector* a_true) {
  data.validate();
  if (a_true && a_true->size() != data.n_rows()) {
    throw std::invalid_argument("format_dataset_csv: a_true size mismatch");
  }
  std::string out = "y,a_obs";
  if (data.dual()) out += ",a_obs2";
  if (a_true) out += ",a_true";
  for (Eigen::Index j = 0; j < data.n_covariates(); ++j) {
    out += ",x" + std::to_string(j + 1);
  }
  out += '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
    out += data.y[i] == 1 ? '1' : '0';
    out += ',';
    out += data.a_obs[i] == 1 ? '1' : '0';
    if (data.dual()) {
      out += ',';
      out += (*data.a_obs2)[i] == 1 ? '1' : '0';
    }
    if (a_true) {
      out += ',';
      out += (*a_true)[i] == 1 ? '1' : '0';
    }
    for (Eigen::Index j = 0; j < data.n_covariates(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g", data.x(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  fs::path temp = (dir.empty() ? fs::path(".") : dir) /
                  (target.filename().string() + ".tmp." +
                   std::to_string(::getpid()));
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open '" + temp.string() +
                               "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw std::runtime_error("write failed for '" + temp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw std::runtime_error("cannot move temporary file onto '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace underreport
