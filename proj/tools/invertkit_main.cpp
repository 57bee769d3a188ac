#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "invertkit/commands.hpp"

namespace {

using invertkit::RunConfig;

// Registered dotted-key flags; values go through the same text parsing as
// --set so --gp.seed=7 and --set gp.seed=7 behave identically.
class KeyOptions {
 public:
  void add(CLI::App* cmd, const std::string& key, const std::string& desc) {
    auto slot = std::make_unique<Slot>();
    slot->key = key;
    slot->opt = cmd->add_option("--" + key, slot->value, desc);
    slots_.push_back(std::move(slot));
  }

  void apply(RunConfig& config) const {
    for (const auto& slot : slots_) {
      if (slot->opt->count() > 0) config.set_text(slot->key, slot->value);
    }
  }

 private:
  struct Slot {
    std::string key;
    std::string value;
    CLI::Option* opt = nullptr;
  };
  std::vector<std::unique_ptr<Slot>> slots_;
};

struct CommandSpec {
  CLI::App* app = nullptr;
  std::string config_path;
  std::vector<std::string> sets;
  KeyOptions keys;
  std::function<int(RunConfig)> run;
};

void add_common(CommandSpec& spec) {
  spec.app->add_option("-c,--config", spec.config_path,
                       "JSON config file with flat dotted keys");
  spec.app->add_option("--set", spec.sets,
                       "Override a config value as key=value");
}

void add_synth_keys(CommandSpec& spec) {
  spec.keys.add(spec.app, "synth.model", "Model S-expression(s), ';'-separated");
  spec.keys.add(spec.app, "synth.box", "Sampling box [[lo,hi],...]");
  spec.keys.add(spec.app, "synth.points", "Sample count (default 601)");
  spec.keys.add(spec.app, "synth.noise", "Uniform noise half-width (default 0)");
  spec.keys.add(spec.app, "synth.seed", "Sampling/noise seed (default 0)");
  spec.keys.add(spec.app, "synth.random", "Random instead of grid sampling");
}

void add_gp_keys(CommandSpec& spec) {
  spec.keys.add(spec.app, "gp.population_size", "Population (default 1000)");
  spec.keys.add(spec.app, "gp.max_depth", "Tree depth cap (default 5)");
  spec.keys.add(spec.app, "gp.generations", "Generation cap (default 200)");
  spec.keys.add(spec.app, "gp.target_cost", "Stop at this MSE (default 1e-3)");
  spec.keys.add(spec.app, "gp.tournament_size", "Tournament k (default 7)");
  spec.keys.add(spec.app, "gp.crossover_rate", "Crossover rate (default 0.8)");
  spec.keys.add(spec.app, "gp.mutation_rate", "Mutation rate (default 0.15)");
  spec.keys.add(spec.app, "gp.reproduction_rate",
                "Reproduction rate (default 0.05)");
  spec.keys.add(spec.app, "gp.const_lo", "Constant range low (default -5)");
  spec.keys.add(spec.app, "gp.const_hi", "Constant range high (default 5)");
  spec.keys.add(spec.app, "gp.seed", "Base seed (default 0)");
  spec.keys.add(spec.app, "gp.restarts", "Independent restarts (default 8)");
  spec.keys.add(spec.app, "gp.elite_count", "Elites per restart (default 10)");
  spec.keys.add(spec.app, "gp.elite_merge_population",
                "Merge run population (default 2000)");
}

void add_invert_keys(CommandSpec& spec, bool with_model) {
  if (with_model) {
    spec.keys.add(spec.app, "invert.model", "Model S-expression(s)");
    spec.keys.add(spec.app, "invert.model_file", "File holding the model text");
  }
  spec.keys.add(spec.app, "problem.R", "Adjustment box [[lo,hi],...]");
  spec.keys.add(spec.app, "problem.P", "Performance box [[lo,hi],...]");
  spec.keys.add(spec.app, "psi.resolution", "Stop volume (default 1e-3)");
  spec.keys.add(spec.app, "psi.resolution_width",
                "Stop width, converted to width^dim");
  spec.keys.add(spec.app, "psi.max_boxes", "Classification budget");
  spec.keys.add(spec.app, "psi.workers",
                "Domain slabs (default $INVERTKIT_WORKERS or 1)");
  spec.keys.add(spec.app, "out.paving_json", "Paving JSON output path");
  spec.keys.add(spec.app, "out.paving_csv", "Paving CSV output path");
  spec.keys.add(spec.app, "out.svg", "Paving SVG output path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn closed-form models from data and invert them into "
               "guaranteed box pavings"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<CommandSpec>> specs;
  const auto make = [&](const char* name, const char* desc,
                        std::function<int(RunConfig)> run) -> CommandSpec& {
    auto spec = std::make_unique<CommandSpec>();
    spec->app = app.add_subcommand(name, desc);
    spec->run = std::move(run);
    add_common(*spec);
    specs.push_back(std::move(spec));
    return *specs.back();
  };

  CommandSpec& synth =
      make("synth", "Sample a known model into a CSV dataset",
           invertkit::cmd_synth);
  add_synth_keys(synth);
  synth.keys.add(synth.app, "out.data", "Output CSV path");

  CommandSpec& regress =
      make("regress", "Fit a closed-form model to a CSV dataset",
           invertkit::cmd_regress);
  regress.keys.add(regress.app, "data.in", "Input CSV path");
  add_gp_keys(regress);
  regress.keys.add(regress.app, "out.model", "Fitted model text output path");
  regress.keys.add(regress.app, "out.report", "Fit report JSON output path");

  CommandSpec& invert =
      make("invert", "Pave the preimage of a performance box",
           invertkit::cmd_invert);
  add_invert_keys(invert, /*with_model=*/true);

  CommandSpec& pipeline =
      make("pipeline", "synth, regress and invert in one run",
           invertkit::cmd_pipeline);
  add_synth_keys(pipeline);
  pipeline.keys.add(pipeline.app, "out.data", "Synthesized CSV output path");
  add_gp_keys(pipeline);
  pipeline.keys.add(pipeline.app, "out.model", "Fitted model text output path");
  pipeline.keys.add(pipeline.app, "out.report", "Fit report JSON output path");
  add_invert_keys(pipeline, /*with_model=*/false);

  CommandSpec& plot =
      make("plot", "Render a saved paving as SVG", invertkit::cmd_plot);
  plot.keys.add(plot.app, "plot.paving", "Paving JSON input path");
  plot.keys.add(plot.app, "out.svg", "SVG output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invertkit::kExitError;
  }

  for (const auto& spec : specs) {
    if (!spec->app->parsed()) continue;
    try {
      RunConfig config;
      if (!spec->config_path.empty()) {
        config = RunConfig::from_file(spec->config_path);
      }
      spec->keys.apply(config);
      for (const std::string& kv : spec->sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw std::invalid_argument("--set expects key=value, got '" + kv +
                                      "'");
        }
        config.set_text(kv.substr(0, eq), kv.substr(eq + 1));
      }
      return spec->run(std::move(config));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return invertkit::kExitError;
    }
  }
  return invertkit::kExitError;
}
