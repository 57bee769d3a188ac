#include "invertkit/commands.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "invertkit/dataset.hpp"
#include "invertkit/gp.hpp"
#include "invertkit/paving_io.hpp"
#include "invertkit/psi.hpp"
#include "invertkit/svg.hpp"

namespace invertkit {

namespace {

std::string dtos(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void flatten_into(RunConfig& config, const std::string& prefix,
                  const nlohmann::json& j) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten_into(config, prefix.empty() ? key : prefix + "." + key, value);
    }
    return;
  }
  config.set(prefix, j);
}

Box box_from_value(const std::string& key, const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("'" + key +
                                "' must be a non-empty array of [lo, hi]");
  }
  std::vector<Interval> axes;
  axes.reserve(j.size());
  for (const auto& ax : j) {
    if (!ax.is_array() || ax.size() != 2 || !ax[0].is_number() ||
        !ax[1].is_number()) {
      throw std::invalid_argument("'" + key +
                                  "' axes must be [lo, hi] number pairs");
    }
    axes.emplace_back(ax[0].get<double>(), ax[1].get<double>());
  }
  return Box(std::move(axes));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() &&
         std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  return text;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument(path + ": config must be a JSON object");
  }
  RunConfig config;
  flatten_into(config, "", j);
  return config;
}

void RunConfig::set(const std::string& key, nlohmann::json value) {
  values_[key] = std::move(value);
}

void RunConfig::set_text(const std::string& key, const std::string& value) {
  const nlohmann::json parsed =
      nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    values_[key] = value;
  } else {
    values_[key] = parsed;
  }
}

bool RunConfig::has(const std::string& key) const {
  return values_.contains(key);
}

const nlohmann::json* RunConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) {
  const nlohmann::json* v = find(key);
  if (!v) {
    values_[key] = fallback;
    return fallback;
  }
  if (!v->is_number()) {
    throw std::invalid_argument("'" + key + "' must be a number");
  }
  return v->get<double>();
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) {
  const nlohmann::json* v = find(key);
  if (!v) {
    values_[key] = fallback;
    return fallback;
  }
  if (!v->is_number_integer() && !v->is_number_unsigned()) {
    throw std::invalid_argument("'" + key + "' must be an integer");
  }
  return v->get<std::int64_t>();
}

std::uint64_t RunConfig::get_uint(const std::string& key,
                                  std::uint64_t fallback) {
  const nlohmann::json* v = find(key);
  if (!v) {
    values_[key] = fallback;
    return fallback;
  }
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v->get<std::int64_t>());
  }
  throw std::invalid_argument("'" + key + "' must be a non-negative integer");
}

bool RunConfig::get_bool(const std::string& key, bool fallback) {
  const nlohmann::json* v = find(key);
  if (!v) {
    values_[key] = fallback;
    return fallback;
  }
  if (!v->is_boolean()) {
    throw std::invalid_argument("'" + key + "' must be true or false");
  }
  return v->get<bool>();
}

std::string RunConfig::get_string(const std::string& key,
                                  const std::string& fallback) {
  const nlohmann::json* v = find(key);
  if (!v) {
    values_[key] = fallback;
    return fallback;
  }
  if (!v->is_string()) {
    throw std::invalid_argument("'" + key + "' must be a string");
  }
  return v->get<std::string>();
}

std::string RunConfig::require_string(const std::string& key) {
  const nlohmann::json* v = find(key);
  if (!v) throw std::invalid_argument("missing required key '" + key + "'");
  if (!v->is_string()) {
    throw std::invalid_argument("'" + key + "' must be a string");
  }
  return v->get<std::string>();
}

Box RunConfig::require_box(const std::string& key) {
  const nlohmann::json* v = find(key);
  if (!v) throw std::invalid_argument("missing required key '" + key + "'");
  return box_from_value(key, *v);
}

nlohmann::ordered_json RunConfig::resolved() const {
  nlohmann::ordered_json out;
  for (const auto& [key, value] : values_) out[key] = value;
  return out;
}

void RunConfig::echo() const { std::cout << resolved().dump() << "\n"; }

int default_workers() {
  const char* env = std::getenv("INVERTKIT_WORKERS");
  if (!env) return 1;
  int value = 0;
  const char* end = env + std::string_view(env).size();
  const auto res = std::from_chars(env, end, value);
  if (res.ec != std::errc() || res.ptr != end || value < 1) return 1;
  return value;
}

namespace {

struct SynthParams {
  std::string model;
  Box box;
  int points;
  double noise;
  std::uint64_t seed;
  bool random;
};

SynthParams read_synth(RunConfig& config) {
  SynthParams p{.model = config.require_string("synth.model"),
                .box = config.require_box("synth.box"),
                .points = static_cast<int>(config.get_int("synth.points", 601)),
                .noise = config.get_double("synth.noise", 0.0),
                .seed = config.get_uint("synth.seed", 0),
                .random = config.get_bool("synth.random", false)};
  return p;
}

GpConfig read_gp(RunConfig& config) {
  GpConfig g;
  g.population_size =
      static_cast<int>(config.get_int("gp.population_size", 1000));
  g.max_depth = static_cast<int>(config.get_int("gp.max_depth", 5));
  g.generations = static_cast<int>(config.get_int("gp.generations", 200));
  g.target_cost = config.get_double("gp.target_cost", 1e-3);
  g.tournament_size =
      static_cast<int>(config.get_int("gp.tournament_size", 7));
  g.crossover_rate = config.get_double("gp.crossover_rate", 0.8);
  g.mutation_rate = config.get_double("gp.mutation_rate", 0.15);
  g.reproduction_rate = config.get_double("gp.reproduction_rate", 0.05);
  g.const_lo = config.get_double("gp.const_lo", -5.0);
  g.const_hi = config.get_double("gp.const_hi", 5.0);
  g.seed = config.get_uint("gp.seed", 0);
  g.restarts = static_cast<int>(config.get_int("gp.restarts", 8));
  g.elite_count = static_cast<int>(config.get_int("gp.elite_count", 10));
  g.elite_merge_population =
      static_cast<int>(config.get_int("gp.elite_merge_population", 2000));
  g.validate();
  return g;
}

struct RegressOutcome {
  std::vector<MultiStartResult> components;
  std::vector<std::string> component_models;
  std::string model_text;
  bool all_reached = true;
};

// One multi-start per output column; component seeds are spaced past the
// previous component's restart and merge seeds.
RegressOutcome run_regression(const SignalTable& table, const GpConfig& base) {
  RegressOutcome out;
  for (std::size_t c = 0; c < table.output_count(); ++c) {
    const Dataset data = to_dataset(table, c);
    GpConfig component_config = base;
    component_config.seed =
        base.seed + static_cast<std::uint64_t>(c) *
                        static_cast<std::uint64_t>(base.restarts + 1);
    MultiStartResult r = multi_start_evolve(data, component_config);
    out.all_reached = out.all_reached && r.target_reached;
    out.component_models.push_back(format_sexpr(r.best.expr));
    if (c) out.model_text += "; ";
    out.model_text += out.component_models.back();
    out.components.push_back(std::move(r));
  }
  return out;
}

nlohmann::ordered_json regression_report(const RegressOutcome& outcome) {
  nlohmann::ordered_json report;
  report["model"] = outcome.model_text;
  report["target_reached"] = outcome.all_reached;
  nlohmann::ordered_json components = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < outcome.components.size(); ++c) {
    const MultiStartResult& r = outcome.components[c];
    nlohmann::ordered_json entry;
    entry["component"] = c;
    entry["model"] = outcome.component_models[c];
    entry["best_cost"] = r.best.cost;
    entry["best_run"] = r.best_run;
    entry["target_reached"] = r.target_reached;
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const RunSummary& s : r.runs) {
      nlohmann::ordered_json run;
      run["seed"] = s.seed;
      run["best_cost"] = s.best_cost;
      run["generations_used"] = s.generations_used;
      run["target_reached"] = s.target_reached;
      runs.push_back(std::move(run));
    }
    entry["runs"] = std::move(runs);
    components.push_back(std::move(entry));
  }
  report["components"] = std::move(components);
  return report;
}

void write_regression_outputs(const RegressOutcome& outcome,
                              const std::optional<std::string>& model_path,
                              const std::optional<std::string>& report_path) {
  if (model_path) {
    std::ofstream out(*model_path, std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + *model_path + " for writing");
    }
    out << outcome.model_text << "\n";
    if (!out) throw std::runtime_error("write failed: " + *model_path);
  }
  if (report_path) {
    std::ofstream out(*report_path, std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + *report_path + " for writing");
    }
    out << regression_report(outcome).dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + *report_path);
  }
}

void print_regression(const RegressOutcome& outcome) {
  for (std::size_t c = 0; c < outcome.components.size(); ++c) {
    std::cout << "component=" << c
              << " cost=" << dtos(outcome.components[c].best.cost)
              << " model=" << outcome.component_models[c] << "\n";
  }
  std::cout << "target_reached="
            << (outcome.all_reached ? "true" : "false") << "\n";
}

struct InvertParams {
  Box domain;
  Box performance;
  PsiConfig psi;
  std::optional<std::string> out_json;
  std::optional<std::string> out_csv;
  std::optional<std::string> out_svg;
};

std::optional<std::string> optional_path(RunConfig& config,
                                         const std::string& key) {
  if (!config.has(key)) return std::nullopt;
  return config.require_string(key);
}

InvertParams read_invert(RunConfig& config) {
  InvertParams p;
  p.domain = config.require_box("problem.R");
  p.performance = config.require_box("problem.P");

  const bool has_volume = config.has("psi.resolution");
  const bool has_width = config.has("psi.resolution_width");
  if (has_volume && has_width) {
    throw std::invalid_argument(
        "give psi.resolution or psi.resolution_width, not both");
  }
  if (has_width) {
    const double width = config.get_double("psi.resolution_width", 0.0);
    if (!(width > 0.0)) {
      throw std::invalid_argument("'psi.resolution_width' must be positive");
    }
    double volume = 1.0;
    for (std::size_t a = 0; a < p.domain.dim(); ++a) volume *= width;
    p.psi.resolution = volume;
  } else {
    p.psi.resolution = config.get_double("psi.resolution", 1e-3);
  }
  p.psi.max_boxes = config.get_uint("psi.max_boxes", 10'000'000);
  p.psi.workers = static_cast<int>(
      config.get_int("psi.workers", default_workers()));
  p.psi.validate();

  p.out_json = optional_path(config, "out.paving_json");
  p.out_csv = optional_path(config, "out.paving_csv");
  p.out_svg = optional_path(config, "out.svg");
  if (p.out_svg && p.domain.dim() > 2) {
    throw std::invalid_argument("out.svg needs a 1D or 2D adjustment box");
  }
  return p;
}

void write_paving_outputs(const Paving& paving, const InvertParams& p) {
  if (p.out_json) save_paving_json(paving, *p.out_json);
  if (p.out_csv) save_paving_csv(paving, *p.out_csv);
  if (p.out_svg) save_paving_svg(paving, *p.out_svg);
}

void print_paving(const Paving& paving, bool partial, std::size_t pending) {
  std::cout << (partial ? "partial " : "") << "boxes=" << paving.total_boxes()
            << " accepted=" << paving.accepted.size()
            << " rejected=" << paving.rejected.size()
            << " boundary=" << paving.boundary.size();
  if (partial) std::cout << " pending=" << pending;
  std::cout << " accepted_volume=" << dtos(paving.accepted_volume())
            << " boundary_volume=" << dtos(paving.boundary_volume()) << "\n";
}

int run_inversion(const ExprVector& model, const InvertParams& p) {
  const InversionProblem problem(model, p.domain, p.performance);
  try {
    const Paving paving = invert_decomposed(problem, p.psi);
    write_paving_outputs(paving, p);
    print_paving(paving, false, 0);
    return kExitOk;
  } catch (const MaxBoxesExceeded& e) {
    write_paving_outputs(e.partial, p);
    print_paving(e.partial, true, e.pending.size());
    return kExitPartialPaving;
  }
}

}  // namespace

int cmd_synth(RunConfig config) {
  const SynthParams p = read_synth(config);
  const std::string out_path = config.require_string("out.data");
  config.echo();

  const SignalTable table =
      synth(p.model, p.box, p.points, p.noise, p.seed, p.random);
  save_csv(table, out_path);
  std::cout << "rows=" << table.rows.size() << " out=" << out_path << "\n";
  return kExitOk;
}

int cmd_regress(RunConfig config) {
  const std::string in_path = config.require_string("data.in");
  const GpConfig gp = read_gp(config);
  const auto model_path = optional_path(config, "out.model");
  const auto report_path = optional_path(config, "out.report");
  config.echo();

  const SignalTable table = load_csv(in_path);
  const RegressOutcome outcome = run_regression(table, gp);
  write_regression_outputs(outcome, model_path, report_path);
  print_regression(outcome);
  return outcome.all_reached ? kExitOk : kExitBudget;
}

int cmd_invert(RunConfig config) {
  const bool inline_model = config.has("invert.model");
  const bool file_model = config.has("invert.model_file");
  if (inline_model && file_model) {
    throw std::invalid_argument(
        "give invert.model or invert.model_file, not both");
  }
  if (!inline_model && !file_model) {
    throw std::invalid_argument(
        "missing required key 'invert.model' (or 'invert.model_file')");
  }
  const std::string model_text =
      inline_model ? config.require_string("invert.model")
                   : read_text_file(config.require_string("invert.model_file"));
  const InvertParams p = read_invert(config);
  config.echo();

  const ExprVector model =
      parse_model_text(model_text, static_cast<int>(p.domain.dim()));
  return run_inversion(model, p);
}

int cmd_pipeline(RunConfig config) {
  const SynthParams sp = read_synth(config);
  const auto data_path = optional_path(config, "out.data");
  const GpConfig gp = read_gp(config);
  const auto model_path = optional_path(config, "out.model");
  const auto report_path = optional_path(config, "out.report");
  const InvertParams ip = read_invert(config);
  config.echo();

  SignalTable table;
  try {
    table = synth(sp.model, sp.box, sp.points, sp.noise, sp.seed, sp.random);
    if (data_path) save_csv(table, *data_path);
    std::cout << "rows=" << table.rows.size() << "\n";
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("synth: ") + e.what());
  }

  RegressOutcome outcome;
  try {
    outcome = run_regression(table, gp);
    write_regression_outputs(outcome, model_path, report_path);
    print_regression(outcome);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("regress: ") + e.what());
  }
  const int regress_code = outcome.all_reached ? kExitOk : kExitBudget;

  int invert_code = kExitOk;
  try {
    const ExprVector model = parse_model_text(
        outcome.model_text, static_cast<int>(ip.domain.dim()));
    invert_code = run_inversion(model, ip);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("invert: ") + e.what());
  }

  return std::max(regress_code, invert_code);
}

int cmd_plot(RunConfig config) {
  const std::string paving_path = config.require_string("plot.paving");
  const std::string svg_path = config.require_string("out.svg");
  config.echo();

  const Paving paving = load_paving_json(paving_path);
  save_paving_svg(paving, svg_path);
  std::cout << "svg=" << svg_path << "\n";
  return kExitOk;
}

}  // namespace invertkit
