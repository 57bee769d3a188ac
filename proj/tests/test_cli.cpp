#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "json.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

struct CliFixture {
  std::filesystem::path dir;

  CliFixture() {
    dir = std::filesystem::temp_directory_path() /
          ("invertkit-cli-" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
  }
  ~CliFixture() { std::filesystem::remove_all(dir); }

  std::string file(const std::string& name) const {
    return (dir / name).string();
  }

  RunResult run(const std::string& args, const std::string& env = "") const {
    const char* bin = std::getenv("INVERTKIT_CLI_PATH");
    REQUIRE_MESSAGE(bin != nullptr,
                    "INVERTKIT_CLI_PATH must point at the invertkit binary");
    const std::string capture = file("capture.txt");
    std::string cmd;
    if (!env.empty()) cmd += env + " ";
    cmd += "'" + std::string(bin) + "' " + args + " > '" + capture + "' 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    r.code = WEXITSTATUS(status);
    std::ifstream in(capture, std::ios::binary);
    r.output.assign(std::istreambuf_iterator<char>(in),
                    std::istreambuf_iterator<char>());
    return r;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("synth echoes its resolved config and writes the dataset") {
  CliFixture fx;
  const std::string csv = fx.file("data.csv");
  const RunResult r = fx.run(
      "synth --synth.model '(* x x)' --synth.box '[[-2,2]]' "
      "--synth.points 21 --out.data '" + csv + "'");
  CHECK(r.code == 0);

  const auto echo = nlohmann::json::parse(first_line(r.output));
  CHECK(echo.at("synth.points") == 21);
  CHECK(echo.at("synth.noise") == 0.0);
  CHECK(echo.at("synth.model") == "(* x x)");
  CHECK(r.output.find("rows=21 out=" + csv) != std::string::npos);

  const std::string data = read_file(csv);
  CHECK(data.rfind("x,f\n", 0) == 0);

  // Re-running reproduces the file byte for byte.
  const std::string copy = fx.file("data2.csv");
  const RunResult again = fx.run(
      "synth --synth.model '(* x x)' --synth.box '[[-2,2]]' "
      "--synth.points 21 --out.data '" + copy + "'");
  CHECK(again.code == 0);
  CHECK(read_file(copy) == data);
}

TEST_CASE("a missing required key aborts before any file is written") {
  CliFixture fx;
  const RunResult r = fx.run(
      "synth --synth.model x --synth.box '[[-1,1]]' --synth.points 5");
  CHECK(r.code == 1);
  CHECK(r.output.find("error: missing required key 'out.data'") !=
        std::string::npos);

  const RunResult bad_model = fx.run(
      "synth --synth.box '[[-1,1]]' --out.data '" + fx.file("x.csv") + "'");
  CHECK(bad_model.code == 1);
  CHECK(bad_model.output.find("synth.model") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(fx.file("x.csv")));
}

TEST_CASE("invert pave and report, deterministically") {
  CliFixture fx;
  const std::string json_path = fx.file("paving.json");
  const std::string args =
      "invert --invert.model '(* x x)' --problem.R '[[-2,2]]' "
      "--problem.P '[[0,1]]' --psi.resolution_width 0.01 "
      "--out.paving_json '" + json_path + "'";
  const RunResult r = fx.run(args);
  CHECK(r.code == 0);
  CHECK(r.output.find("boxes=44 accepted=24 rejected=14 boundary=6 "
                      "accepted_volume=1.96875 boundary_volume=0.046875") !=
        std::string::npos);

  const auto echo = nlohmann::json::parse(first_line(r.output));
  CHECK(echo.at("psi.resolution_width") == 0.01);
  CHECK_FALSE(echo.contains("psi.resolution"));
  CHECK(echo.at("psi.workers") == 1);

  const std::string bytes = read_file(json_path);
  const auto paving = nlohmann::json::parse(bytes);
  CHECK(paving.at("accepted").size() == 24);

  const std::string second = fx.file("paving2.json");
  const RunResult again = fx.run(
      "invert --invert.model '(* x x)' --problem.R '[[-2,2]]' "
      "--problem.P '[[0,1]]' --psi.resolution_width 0.01 "
      "--out.paving_json '" + second + "'");
  CHECK(again.code == 0);
  CHECK(read_file(second) == bytes);
}

TEST_CASE("the model comes inline or from a file, never both") {
  CliFixture fx;
  const std::string model_file = fx.file("model.txt");
  {
    std::ofstream out(model_file);
    out << "(* x x)\n";
  }
  const std::string from_file = fx.file("a.json");
  const RunResult r1 = fx.run(
      "invert --invert.model_file '" + model_file + "' "
      "--problem.R '[[-2,2]]' --problem.P '[[0,1]]' "
      "--psi.resolution_width 0.01 --out.paving_json '" + from_file + "'");
  CHECK(r1.code == 0);

  const std::string inline_path = fx.file("b.json");
  const RunResult r2 = fx.run(
      "invert --invert.model '(* x x)' --problem.R '[[-2,2]]' "
      "--problem.P '[[0,1]]' --psi.resolution_width 0.01 "
      "--out.paving_json '" + inline_path + "'");
  CHECK(r2.code == 0);
  CHECK(read_file(from_file) == read_file(inline_path));

  const RunResult both = fx.run(
      "invert --invert.model x --invert.model_file '" + model_file + "' "
      "--problem.R '[[-2,2]]' --problem.P '[[0,1]]'");
  CHECK(both.code == 1);
  CHECK(both.output.find("give invert.model or invert.model_file, not both") !=
        std::string::npos);

  const RunResult neither = fx.run(
      "invert --problem.R '[[-2,2]]' --problem.P '[[0,1]]'");
  CHECK(neither.code == 1);
  CHECK(neither.output.find(
            "missing required key 'invert.model' (or 'invert.model_file')") !=
        std::string::npos);
}

TEST_CASE("an exhausted box budget exits 3 with a partial paving on disk") {
  CliFixture fx;
  const std::string json_path = fx.file("partial.json");
  const RunResult r = fx.run(
      "invert --invert.model '(* x x)' --problem.R '[[-2,2]]' "
      "--problem.P '[[0,1]]' --psi.resolution_width 0.001 "
      "--psi.max_boxes 7 --out.paving_json '" + json_path + "'");
  CHECK(r.code == 3);
  CHECK(r.output.find("partial boxes=") != std::string::npos);
  CHECK(r.output.find(" pending=") != std::string::npos);
  const auto paving = nlohmann::json::parse(read_file(json_path));
  CHECK(paving.contains("boundary"));
}

TEST_CASE("an svg request on a 3d problem fails before paving") {
  CliFixture fx;
  const std::string json_path = fx.file("never.json");
  const RunResult r = fx.run(
      "invert --invert.model '(+ x (+ y z))' "
      "--problem.R '[[0,1],[0,1],[0,1]]' --problem.P '[[0,3]]' "
      "--out.svg '" + fx.file("never.svg") + "' "
      "--out.paving_json '" + json_path + "'");
  CHECK(r.code == 1);
  CHECK(r.output.find("out.svg needs a 1D or 2D adjustment box") !=
        std::string::npos);
  CHECK_FALSE(std::filesystem::exists(json_path));
  CHECK_FALSE(std::filesystem::exists(fx.file("never.svg")));
}

TEST_CASE("regress exits 2 when the budget cannot reach the target") {
  CliFixture fx;
  const std::string csv = fx.file("train.csv");
  const RunResult made = fx.run(
      "synth --synth.model '(* (sin (* 5 x)) (exp (neg (* x x))))' "
      "--synth.box '[[-2,2]]' --synth.points 101 --out.data '" + csv + "'");
  REQUIRE(made.code == 0);

  const std::string model_path = fx.file("model.txt");
  const std::string report_path = fx.file("report.json");
  const RunResult r = fx.run(
      "regress --data.in '" + csv + "' --gp.population_size 20 "
      "--gp.generations 1 --gp.restarts 1 --gp.elite_merge_population 20 "
      "--gp.elite_count 3 --out.model '" + model_path + "' "
      "--out.report '" + report_path + "'");
  CHECK(r.code == 2);
  CHECK(r.output.find("target_reached=false") != std::string::npos);
  CHECK(r.output.find("component=0") != std::string::npos);

  const std::string model_text = read_file(model_path);
  CHECK_FALSE(model_text.empty());
  const auto report = nlohmann::json::parse(read_file(report_path));
  CHECK(report.at("target_reached") == false);
  CHECK(report.at("components").size() == 1);
  CHECK(report.at("components")[0].at("runs").size() == 2);
}

TEST_CASE("pipeline chains synth, regress and invert") {
  CliFixture fx;
  const RunResult r = fx.run(
      "pipeline --synth.model x --synth.box '[[-1,1]]' --synth.points 51 "
      "--gp.population_size 200 --gp.generations 10 --gp.restarts 1 "
      "--gp.elite_merge_population 200 --gp.target_cost 1e-6 "
      "--problem.R '[[-1,1]]' --problem.P '[[-0.5,0.5]]' "
      "--psi.resolution_width 0.1 "
      "--out.model '" + fx.file("fit.txt") + "' "
      "--out.paving_json '" + fx.file("pipe.json") + "'");
  CHECK(r.code == 0);
  CHECK(r.output.find("rows=51") != std::string::npos);
  CHECK(r.output.find("target_reached=true") != std::string::npos);
  CHECK(r.output.find("boxes=") != std::string::npos);
  CHECK(std::filesystem::exists(fx.file("fit.txt")));
  CHECK(std::filesystem::exists(fx.file("pipe.json")));
}

TEST_CASE("config file keys lose to flags, flags lose to --set") {
  CliFixture fx;
  const std::string cfg = fx.file("run.json");
  {
    std::ofstream out(cfg);
    out << R"({"synth": {"model": "x", "box": [[-1,1]], "points": 11},)"
        << R"( "out": {"data": ")" << fx.file("cfg.csv") << R"("}})";
  }
  const RunResult file_only = fx.run("synth -c '" + cfg + "'");
  CHECK(file_only.code == 0);
  CHECK(nlohmann::json::parse(first_line(file_only.output))
            .at("synth.points") == 11);
  CHECK(file_only.output.find("rows=11") != std::string::npos);

  const RunResult with_flag =
      fx.run("synth -c '" + cfg + "' --synth.points 21");
  CHECK(with_flag.code == 0);
  CHECK(nlohmann::json::parse(first_line(with_flag.output))
            .at("synth.points") == 21);
  CHECK(with_flag.output.find("rows=21") != std::string::npos);

  const RunResult with_set = fx.run(
      "synth -c '" + cfg + "' --synth.points 21 --set synth.points=31");
  CHECK(with_set.code == 0);
  CHECK(nlohmann::json::parse(first_line(with_set.output))
            .at("synth.points") == 31);
  CHECK(with_set.output.find("rows=31") != std::string::npos);

  const RunResult bad_set = fx.run("synth -c '" + cfg + "' --set oops");
  CHECK(bad_set.code == 1);
  CHECK(bad_set.output.find("--set expects key=value, got 'oops'") !=
        std::string::npos);
}

TEST_CASE("the workers default comes from the environment") {
  CliFixture fx;
  const RunResult r = fx.run(
      "invert --invert.model x --problem.R '[[0,1]]' --problem.P '[[0,1]]'",
      "INVERTKIT_WORKERS=2");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(first_line(r.output)).at("psi.workers") == 2);

  const RunResult flag_wins = fx.run(
      "invert --invert.model x --problem.R '[[0,1]]' --problem.P '[[0,1]]' "
      "--psi.workers 1",
      "INVERTKIT_WORKERS=2");
  CHECK(flag_wins.code == 0);
  CHECK(nlohmann::json::parse(first_line(flag_wins.output))
            .at("psi.workers") == 1);
}

TEST_CASE("plot renders a saved paving") {
  CliFixture fx;
  const std::string json_path = fx.file("paving.json");
  REQUIRE(fx.run("invert --invert.model '(* x x)' --problem.R '[[-2,2]]' "
                 "--problem.P '[[0,1]]' --psi.resolution_width 0.01 "
                 "--out.paving_json '" + json_path + "'")
              .code == 0);

  const std::string svg_path = fx.file("paving.svg");
  const RunResult r = fx.run("plot --plot.paving '" + json_path +
                             "' --out.svg '" + svg_path + "'");
  CHECK(r.code == 0);
  CHECK(r.output.find("svg=" + svg_path) != std::string::npos);
  const std::string svg = read_file(svg_path);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  const RunResult missing = fx.run("plot --out.svg '" + svg_path + "'");
  CHECK(missing.code == 1);
}

TEST_CASE("usage errors are loud and exit 1") {
  CliFixture fx;
  const RunResult help = fx.run("--help");
  CHECK(help.code == 0);
  CHECK(help.output.find("synth") != std::string::npos);
  CHECK(help.output.find("invert") != std::string::npos);

  const RunResult none = fx.run("");
  CHECK(none.code == 1);

  const RunResult unknown = fx.run("synth --no-such-flag 1");
  CHECK(unknown.code == 1);
}
