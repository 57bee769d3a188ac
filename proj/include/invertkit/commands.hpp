#pragma once

#include <map>
#include <string>

#include "invertkit/interval.hpp"

#include "json.hpp"

namespace invertkit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;          // bad input or config
inline constexpr int kExitBudget = 2;         // regression target not reached
inline constexpr int kExitPartialPaving = 3;  // max_boxes hit, partial output

// Flat dotted-key configuration (gp.population_size, psi.resolution,
// problem.R, ...). File values first, flag values on top. Commands
// materialize every default they consume and echo the resolved object as
// the first stdout line, so a run is reproducible from its log.
class RunConfig {
 public:
  static RunConfig from_file(const std::string& path);

  void set(const std::string& key, nlohmann::json value);
  // Flag values arrive as text; JSON-parsable text is stored typed,
  // anything else as a string.
  void set_text(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  // Boxes are written [[lo,hi],...].
  Box require_box(const std::string& key);

  nlohmann::ordered_json resolved() const;
  void echo() const;

 private:
  std::map<std::string, nlohmann::json> values_;

  const nlohmann::json* find(const std::string& key) const;
};

// Subcommand bodies behind the CLI. Each validates its inputs, echoes the
// resolved config, writes outputs only after its computation succeeded,
// and returns an exit code; input errors throw and the caller maps them
// to kExitError.
int cmd_synth(RunConfig config);
int cmd_regress(RunConfig config);
int cmd_invert(RunConfig config);
int cmd_pipeline(RunConfig config);
int cmd_plot(RunConfig config);

// Worker count fallback: INVERTKIT_WORKERS when set, else 1.
int default_workers();

}  // namespace invertkit
