#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "invertkit/gp.hpp"
#include "invertkit/interval.hpp"

namespace invertkit {

// Rectangular table of finite reals, input columns first. A trailing run
// of columns named f or f<digits> is the output block; without one the
// last column alone is the output.
struct SignalTable {
  std::vector<std::string> columns;
  std::size_t input_count = 0;
  std::vector<std::vector<double>> rows;

  std::size_t output_count() const { return columns.size() - input_count; }
  void validate() const;  // throws std::invalid_argument
};

// Header row required; numeric cells only. Errors name the offending row.
SignalTable load_csv(const std::string& path);
// Shortest-representation floats; load_csv(save_csv(t)) is lossless.
void save_csv(const SignalTable& table, const std::string& path);

// Samples the model over the box and adds uniform noise in
// [-noise_half_width, +noise_half_width] per output (none when 0). Grid
// mode places points axis-0-slowest with per-axis count floor(m^(1/n));
// in 1D that is exactly m points. random mode draws m uniform points
// instead. Throws when the model is invalid or non-finite at any point.
SignalTable synth(const std::string& model_text, const Box& box, int points,
                  double noise_half_width, std::uint64_t seed,
                  bool random_sampling = false);

// Keeps rows with index = 0 mod k plus the last row. Errors when the
// stride alone would keep fewer than 2 rows.
SignalTable decimate(const SignalTable& table, int k);

// Single-output view for regression.
Dataset to_dataset(const SignalTable& table, std::size_t output_index);

}  // namespace invertkit
