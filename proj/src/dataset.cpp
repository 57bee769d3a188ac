#include "invertkit/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "invertkit/eval.hpp"
#include "invertkit/rng.hpp"

namespace invertkit {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trimmed(line.substr(start)));
      return out;
    }
    out.push_back(trimmed(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool is_output_name(const std::string& name) {
  if (name.empty() || name[0] != 'f') return false;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return false;
  }
  return true;
}

std::string append_double(std::string s, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  s.append(buf, res.ptr);
  return s;
}

std::string input_name(std::size_t i) {
  switch (i) {
    case 0: return "x";
    case 1: return "y";
    case 2: return "z";
    default: return "x" + std::to_string(i);
  }
}

}  // namespace

void SignalTable::validate() const {
  if (columns.empty()) throw std::invalid_argument("table has no columns");
  if (input_count == 0) throw std::invalid_argument("table has no input columns");
  if (input_count >= columns.size()) {
    throw std::invalid_argument("table has no output columns");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size()) {
      throw std::invalid_argument("row " + std::to_string(r + 1) +
                                  ": expected " + std::to_string(columns.size()) +
                                  " cells, got " + std::to_string(rows[r].size()));
    }
    for (double v : rows[r]) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("row " + std::to_string(r + 1) +
                                    ": non-finite value");
      }
    }
  }
}

SignalTable load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty file: " + path);

  SignalTable table;
  table.columns = split_cells(line);
  for (const auto& name : table.columns) {
    if (name.empty()) throw std::invalid_argument("empty column name in header");
  }

  std::size_t trailing_outputs = 0;
  for (std::size_t i = table.columns.size(); i-- > 0;) {
    if (!is_output_name(table.columns[i])) break;
    ++trailing_outputs;
  }
  if (trailing_outputs == table.columns.size()) {
    throw std::invalid_argument("header has only output columns");
  }
  if (trailing_outputs == 0) {
    if (table.columns.size() < 2) {
      throw std::invalid_argument("header needs an input and an output column");
    }
    trailing_outputs = 1;  // unnamed convention: last column is the output
  }
  table.input_count = table.columns.size() - trailing_outputs;

  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    ++row_number;
    const auto cells = split_cells(line);
    if (cells.size() != table.columns.size()) {
      throw std::invalid_argument(
          "row " + std::to_string(row_number) + ": expected " +
          std::to_string(table.columns.size()) + " cells, got " +
          std::to_string(cells.size()));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (const auto& cell : cells) {
      double v = 0.0;
      const char* first = cell.data();
      const char* last = first + cell.size();
      const auto res = std::from_chars(first, last, v);
      if (res.ec != std::errc() || res.ptr != last) {
        throw std::invalid_argument("row " + std::to_string(row_number) +
                                    ": invalid number '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw std::invalid_argument("row " + std::to_string(row_number) +
                                    ": non-finite value '" + cell + "'");
      }
      values.push_back(v);
    }
    table.rows.push_back(std::move(values));
  }

  table.validate();
  return table;
}

void save_csv(const SignalTable& table, const std::string& path) {
  table.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  std::string text;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) text += ',';
    text += table.columns[i];
  }
  text += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ',';
      text = append_double(std::move(text), row[i]);
    }
    text += '\n';
  }
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

SignalTable synth(const std::string& model_text, const Box& box, int points,
                  double noise_half_width, std::uint64_t seed,
                  bool random_sampling) {
  if (points < 2) throw std::invalid_argument("points must be at least 2");
  if (noise_half_width < 0.0) {
    throw std::invalid_argument("noise half-width must be non-negative");
  }
  const std::size_t n = box.dim();
  const ExprVector model = parse_model_text(model_text, static_cast<int>(n));

  SignalTable table;
  for (std::size_t i = 0; i < n; ++i) table.columns.push_back(input_name(i));
  const std::size_t outputs = model.outputs();
  if (outputs == 1) {
    table.columns.push_back("f");
  } else {
    for (std::size_t c = 0; c < outputs; ++c) {
      table.columns.push_back("f" + std::to_string(c));
    }
  }
  table.input_count = n;

  Rng rng(seed);
  std::vector<std::vector<double>> sample_points;
  if (random_sampling) {
    sample_points.reserve(static_cast<std::size_t>(points));
    for (int r = 0; r < points; ++r) {
      std::vector<double> p(n);
      for (std::size_t a = 0; a < n; ++a) {
        const Interval& ax = box.axis(a);
        p[a] = ax.lo() + ax.width() * rng.uniform01();
      }
      sample_points.push_back(std::move(p));
    }
  } else {
    std::size_t per_axis = static_cast<std::size_t>(points);
    if (n > 1) {
      per_axis = static_cast<std::size_t>(
          std::floor(std::pow(static_cast<double>(points),
                              1.0 / static_cast<double>(n)) +
                     1e-9));
    }
    if (per_axis < 2) {
      throw std::invalid_argument("too few points for a grid over " +
                                  std::to_string(n) + " axes");
    }
    std::size_t total = 1;
    for (std::size_t a = 0; a < n; ++a) total *= per_axis;
    sample_points.reserve(total);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t r = 0; r < total; ++r) {
      std::vector<double> p(n);
      for (std::size_t a = 0; a < n; ++a) {
        const Interval& ax = box.axis(a);
        const double t = static_cast<double>(idx[a]) /
                         static_cast<double>(per_axis - 1);
        p[a] = ax.lo() + ax.width() * t;
      }
      sample_points.push_back(std::move(p));
      for (std::size_t a = n; a-- > 0;) {
        if (++idx[a] < per_axis) break;
        idx[a] = 0;
      }
    }
  }

  for (const auto& p : sample_points) {
    const auto value = eval_scalar(model, p);
    if (!value) {
      std::string msg = "model invalid at point (";
      for (std::size_t a = 0; a < p.size(); ++a) {
        if (a) msg += ", ";
        msg = append_double(std::move(msg), p[a]);
      }
      throw std::invalid_argument(msg + ")");
    }
    std::vector<double> row = p;
    for (double v : *value) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("model non-finite at sampled point");
      }
      row.push_back(v);
    }
    if (noise_half_width > 0.0) {
      for (std::size_t c = 0; c < outputs; ++c) {
        row[n + c] += noise_half_width * (2.0 * rng.uniform01() - 1.0);
      }
    }
    table.rows.push_back(std::move(row));
  }

  table.validate();
  return table;
}

SignalTable decimate(const SignalTable& table, int k) {
  if (k < 1) throw std::invalid_argument("decimation stride must be positive");
  const std::size_t rows = table.rows.size();
  const std::size_t stride = static_cast<std::size_t>(k);
  const std::size_t kept = rows == 0 ? 0 : (rows - 1) / stride + 1;
  if (kept < 2) {
    throw std::invalid_argument("decimation by " + std::to_string(k) +
                                " keeps fewer than 2 of " +
                                std::to_string(rows) + " rows");
  }
  SignalTable out;
  out.columns = table.columns;
  out.input_count = table.input_count;
  for (std::size_t r = 0; r < rows; r += stride) out.rows.push_back(table.rows[r]);
  if ((rows - 1) % stride != 0) out.rows.push_back(table.rows.back());
  return out;
}

Dataset to_dataset(const SignalTable& table, std::size_t output_index) {
  table.validate();
  if (output_index >= table.output_count()) {
    throw std::invalid_argument("output index " + std::to_string(output_index) +
                                " out of range for " +
                                std::to_string(table.output_count()) +
                                " outputs");
  }
  Dataset data;
  data.inputs.reserve(table.rows.size());
  data.outputs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    data.inputs.emplace_back(row.begin(),
                             row.begin() + static_cast<std::ptrdiff_t>(
                                               table.input_count));
    data.outputs.push_back(row[table.input_count + output_index]);
  }
  data.validate();
  return data;
}

}  // namespace invertkit
