// Acceptance gate. Each criterion prints one line:
//   criterion N: PASS/FAIL (details)
// Run with a list of criterion numbers, or no arguments for all nine.
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "invertkit/dataset.hpp"
#include "invertkit/eval.hpp"
#include "invertkit/expr.hpp"
#include "invertkit/gp.hpp"
#include "invertkit/interval.hpp"
#include "invertkit/paving_io.hpp"
#include "invertkit/psi.hpp"
#include "invertkit/rng.hpp"

using namespace invertkit;

namespace {

constexpr const char* kDampedSine = "(* (sin (* 5 x)) (exp (neg (* x x))))";
constexpr const char* kVerbatimModel =
    "(* (* (sin (* x 5)) 1) (exp (* (neg 1) (* x x))))";
constexpr const char* kPlanarSystem =
    "(+ (- (* x x) (* (* y y) (exp x))) (* x (exp y))); "
    "(- (* x (+ x y)) (* y y))";
constexpr const char* kLiftedQuadric = "x; y; z; (+ (- (* x x) (* y y)) (* z z))";

// Probes closer than this to the performance boundary are counted as
// neither interior nor exterior.
constexpr double kOracleGuard = 1e-9;

struct Outcome {
  bool pass = false;
  std::string details;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
             .count() /
         1000.0;
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

// Uniform probe grid over one axis: centers lo + width*(i+0.5)/n.
double grid_center(const Interval& axis, int n, int i) {
  return axis.lo() +
         axis.width() * ((static_cast<double>(i) + 0.5) / static_cast<double>(n));
}

// Inclusive probe-index range of this axis segment, exact by construction:
// estimated from the linear map, then fixed up against recomputed centers.
std::pair<int, int> center_range(const Interval& axis, int n,
                                 const Interval& segment) {
  const double scale = static_cast<double>(n) / axis.width();
  int first =
      static_cast<int>(std::floor((segment.lo() - axis.lo()) * scale - 0.5)) -
      1;
  int last =
      static_cast<int>(std::ceil((segment.hi() - axis.lo()) * scale - 0.5)) + 1;
  first = std::max(first, 0);
  last = std::min(last, n - 1);
  while (first <= last && grid_center(axis, n, first) < segment.lo()) ++first;
  while (first <= last && grid_center(axis, n, last) > segment.hi()) --last;
  return {first, last};
}

// Class of every probe on a regular center grid, with the canonical
// accepted-over-rejected-over-boundary priority for probes on shared
// faces. -1 marks a probe no box contains.
void mark_class(const Paving& paving, const std::vector<int>& counts,
                const std::vector<Box>& boxes, signed char cls,
                std::vector<signed char>& best) {
  const std::size_t dim = paving.domain.dim();
  std::vector<std::pair<int, int>> ranges(dim);
  std::vector<int> index(dim);
  for (const Box& b : boxes) {
    bool empty = false;
    for (std::size_t a = 0; a < dim; ++a) {
      ranges[a] = center_range(paving.domain.axis(a), counts[a], b.axis(a));
      if (ranges[a].first > ranges[a].second) empty = true;
    }
    if (empty) continue;
    for (std::size_t a = 0; a < dim; ++a) index[a] = ranges[a].first;
    bool more = true;
    while (more) {
      std::size_t flat = 0;
      for (std::size_t a = 0; a < dim; ++a) {
        flat = flat * static_cast<std::size_t>(counts[a]) +
               static_cast<std::size_t>(index[a]);
      }
      if (best[flat] < 0 || cls < best[flat]) best[flat] = cls;
      std::size_t a = dim;
      more = false;
      while (a > 0) {
        --a;
        if (++index[a] <= ranges[a].second) {
          more = true;
          break;
        }
        index[a] = ranges[a].first;
      }
    }
  }
}

std::vector<signed char> membership_grid(const Paving& paving,
                                         const std::vector<int>& counts) {
  std::size_t total = 1;
  for (int c : counts) total *= static_cast<std::size_t>(c);
  std::vector<signed char> best(total, -1);
  mark_class(paving, counts, paving.accepted, 0, best);
  mark_class(paving, counts, paving.rejected, 1, best);
  mark_class(paving, counts, paving.boundary, 2, best);
  return best;
}

// -1 interior of P by the guard, +1 exterior, 0 too close to call.
int oracle_side(const Box& performance, std::span<const double> image) {
  bool interior = true;
  for (std::size_t k = 0; k < performance.dim(); ++k) {
    const Interval& p = performance.axis(k);
    const double v = image[k];
    if (v < p.lo() - kOracleGuard || v > p.hi() + kOracleGuard) return 1;
    if (v < p.lo() + kOracleGuard || v > p.hi() - kOracleGuard) {
      interior = false;
    }
  }
  return interior ? -1 : 0;
}

struct SoundnessReport {
  std::size_t interior = 0;
  std::size_t exterior = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
};

SoundnessReport check_soundness(const InversionProblem& problem,
                                const Paving& paving,
                                const std::vector<int>& counts) {
  const auto classes = membership_grid(paving, counts);
  SoundnessReport report;
  const std::size_t dim = problem.domain.dim();
  std::vector<int> index(dim, 0);
  std::vector<double> point(dim);
  std::size_t flat = 0;
  bool more = true;
  while (more) {
    for (std::size_t a = 0; a < dim; ++a) {
      point[a] = grid_center(problem.domain.axis(a), counts[a], index[a]);
    }
    const auto image = eval_scalar(problem.model, point);
    if (!image) {
      ++report.skipped;
    } else {
      const int side = oracle_side(problem.performance, *image);
      const signed char cls = classes[flat];
      if (side == -1) {
        ++report.interior;
        if (cls != 0 && cls != 2) ++report.violations;
      } else if (side == 1) {
        ++report.exterior;
        if (cls != 1 && cls != 2) ++report.violations;
      } else {
        ++report.skipped;
      }
    }
    ++flat;
    std::size_t a = dim;
    more = false;
    while (a > 0) {
      --a;
      if (++index[a] < counts[a]) {
        more = true;
        break;
      }
      index[a] = 0;
    }
  }
  return report;
}

InversionProblem planar_problem() {
  return InversionProblem(
      parse_model_text(kPlanarSystem, 2),
      Box({Interval(-5.0, 5.0), Interval(-5.0, 5.0)}),
      Box({Interval(-5.0, 5.0), Interval(-5.0, 5.0)}));
}

InversionProblem lifted_problem() {
  return InversionProblem(
      parse_model_text(kLiftedQuadric, 3),
      Box({Interval(-5.0, 5.0), Interval(-5.0, 5.0), Interval(-5.0, 5.0)}),
      Box({Interval(-10.0, 10.0), Interval(-10.0, 10.0),
           Interval(-10.0, 10.0), Interval(-10.0, 10.0)}));
}

double damped_sine(double x) {
  return std::sin(5.0 * x) * std::exp(-(x * x));
}

// Largest |model - generator| over the clean 601-point grid on [-3,3].
double grid_supnorm(const ExprPtr& model) {
  double worst = 0.0;
  for (int i = 0; i < 601; ++i) {
    const double x = -3.0 + 6.0 * (static_cast<double>(i) / 600.0);
    const auto v = eval_scalar(*model, std::vector<double>{x});
    if (!v || !std::isfinite(*v)) return 1e300;
    worst = std::max(worst, std::abs(*v - damped_sine(x)));
  }
  return worst;
}

struct GpOutcome {
  MultiStartResult result;
  double seconds = 0.0;
};

GpOutcome run_recovery(double noise, std::uint64_t synth_seed,
                       std::uint64_t gp_seed) {
  const SignalTable table = synth(kDampedSine, Box({Interval(-3.0, 3.0)}), 601,
                                  noise, synth_seed);
  const Dataset data = to_dataset(table, 0);
  GpConfig config;
  config.seed = gp_seed;
  const auto t0 = std::chrono::steady_clock::now();
  GpOutcome out;
  out.result = multi_start_evolve(data, config);
  out.seconds = seconds_since(t0);
  return out;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  GpConfig basis_source;
  Rng rng(20260822);
  std::size_t valid = 0;
  std::size_t violations = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const int arity = 1 + static_cast<int>(rng.below(3));
    const ExprPtr tree =
        grow_tree(rng, basis_source.basis, 5, arity, -5.0, 5.0);
    std::vector<Interval> axes;
    std::vector<double> point;
    for (int a = 0; a < arity; ++a) {
      const double center = rng.uniform(-3.0, 3.0);
      const double half = rng.uniform(0.0, 2.0);
      axes.emplace_back(center - half, center + half);
      point.push_back(rng.uniform(axes.back().lo(), axes.back().hi()));
    }
    const Box box(axes);
    const auto enclosure = eval_interval(*tree, box);
    if (!enclosure) continue;
    ++valid;
    const auto value = eval_scalar(*tree, point);
    if (!value || !enclosure->contains(*value)) ++violations;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 30.0,
          fmt("%zu/100000 valid enclosures, %zu violations, %.1fs",
              valid, violations, secs)};
}

Outcome criterion2() {
  const InversionProblem problem(parse_model_text(kVerbatimModel, 1),
                                 Box({Interval(-2.0, 2.0)}),
                                 Box({Interval(-0.25, 0.5)}));
  PsiConfig config;
  config.resolution = 1e-3;
  const auto t0 = std::chrono::steady_clock::now();
  const Paving paving = invert(problem, config);
  const double secs = seconds_since(t0);

  const SoundnessReport report =
      check_soundness(problem, paving, {4001});
  const double boundary = paving.boundary_volume();
  const bool pass = report.violations == 0 && boundary <= 0.04 && secs < 5.0;
  return {pass,
          fmt("%zu interior + %zu exterior probes, %zu violations, "
              "boundary %.4f <= 0.04, %.2fs",
              report.interior, report.exterior, report.violations, boundary,
              secs)};
}

Outcome criterion3() {
  const InversionProblem problem = planar_problem();
  PsiConfig fine;
  fine.resolution = 0.05 * 0.05;
  const auto t0 = std::chrono::steady_clock::now();
  const Paving paving = invert(problem, fine);
  const double secs = seconds_since(t0);

  const SoundnessReport report =
      check_soundness(problem, paving, {200, 200});
  const double boundary = paving.boundary_volume();

  PsiConfig coarse;
  coarse.resolution = 0.1 * 0.1;
  const Paving half = invert(problem, coarse);
  const double ratio = static_cast<double>(paving.total_boxes()) /
                       static_cast<double>(half.total_boxes());

  const bool pass = report.violations == 0 && boundary <= 5.0 &&
                    secs < 120.0 && ratio <= 4.5;
  return {pass,
          fmt("%zu violations, boundary %.3f <= 5.0, %.1fs < 120s, "
              "refinement ratio %.2f <= 4.5 (%zu vs %zu boxes)",
              report.violations, boundary, secs, ratio, paving.total_boxes(),
              half.total_boxes())};
}

Outcome criterion4() {
  const InversionProblem problem = planar_problem();
  PsiConfig config;
  config.resolution = 0.05 * 0.05;

  std::vector<std::vector<signed char>> grids;
  for (int workers : {1, 2, 4}) {
    config.workers = workers;
    const Paving paving = invert_decomposed(problem, config);
    grids.push_back(membership_grid(paving, {200, 200}));
  }
  std::size_t disagreements = 0;
  for (std::size_t i = 0; i < grids[0].size(); ++i) {
    if (grids[0][i] != grids[1][i] || grids[0][i] != grids[2][i]) {
      ++disagreements;
    }
  }
  return {disagreements == 0,
          fmt("%zu probes, %zu disagreements across workers {1,2,4}",
              grids[0].size(), disagreements)};
}

Outcome criterion5() {
  const GpOutcome gp = run_recovery(0.0, 0, 0);
  bool any_reached = false;
  for (const auto& run : gp.result.runs) {
    any_reached = any_reached || run.best_cost <= 1e-3;
  }
  const double sup = grid_supnorm(gp.result.best.expr);
  const bool pass = any_reached && sup <= 1e-6 && gp.seconds < 600.0;
  return {pass,
          fmt("best cost %.3g, sup-norm %.3g <= 1e-6, reached=%d, %.1fs, "
              "model %s",
              gp.result.best.cost, sup, any_reached ? 1 : 0, gp.seconds,
              format_sexpr(gp.result.best.expr).c_str())};
}

Outcome criterion6() {
  const GpOutcome gp = run_recovery(0.25, 12345, 0);
  const double sup = grid_supnorm(gp.result.best.expr);
  const bool pass = sup <= 0.1 && gp.seconds < 600.0;
  return {pass,
          fmt("best cost %.3g, clean-grid sup-norm %.3g <= 0.1, %.1fs, "
              "model %s",
              gp.result.best.cost, sup, gp.seconds,
              format_sexpr(gp.result.best.expr).c_str())};
}

Outcome criterion7() {
  const InversionProblem problem = lifted_problem();
  PsiConfig config;
  config.resolution = 0.25 * 0.25 * 0.25;
  const auto t0 = std::chrono::steady_clock::now();
  const Paving paving = invert(problem, config);
  const double secs = seconds_since(t0);

  const SoundnessReport report =
      check_soundness(problem, paving, {50, 50, 50});
  const bool pass = report.violations == 0 && secs < 600.0;
  return {pass,
          fmt("%zu boxes, %zu interior + %zu exterior probes, "
              "%zu violations, %.1fs < 600s",
              paving.total_boxes(), report.interior, report.exterior,
              report.violations, secs)};
}

Outcome criterion8() {
  std::vector<std::string> mismatches;

  const auto paving_bytes = [](const InversionProblem& problem,
                               const PsiConfig& config) {
    return paving_to_json(invert_decomposed(problem, config)).dump();
  };
  const auto check_paving = [&](const char* label,
                                const InversionProblem& problem,
                                const PsiConfig& config) {
    if (paving_bytes(problem, config) != paving_bytes(problem, config)) {
      mismatches.push_back(label);
    }
  };

  {
    const InversionProblem p(parse_model_text(kVerbatimModel, 1),
                             Box({Interval(-2.0, 2.0)}),
                             Box({Interval(-0.25, 0.5)}));
    PsiConfig c;
    c.resolution = 1e-3;
    check_paving("1d", p, c);
  }
  {
    const InversionProblem p = planar_problem();
    PsiConfig c;
    c.resolution = 0.05 * 0.05;
    check_paving("2d", p, c);
    c.workers = 2;
    check_paving("2d-w2", p, c);
    c.workers = 4;
    check_paving("2d-w4", p, c);
  }
  {
    const InversionProblem p = lifted_problem();
    PsiConfig c;
    c.resolution = 0.25 * 0.25 * 0.25;
    check_paving("3d", p, c);
  }

  const auto check_model = [&](const char* label, double noise,
                               std::uint64_t synth_seed,
                               std::uint64_t gp_seed) {
    const GpOutcome a = run_recovery(noise, synth_seed, gp_seed);
    const GpOutcome b = run_recovery(noise, synth_seed, gp_seed);
    const bool same =
        format_sexpr(a.result.best.expr) == format_sexpr(b.result.best.expr) &&
        std::bit_cast<std::uint64_t>(a.result.best.cost) ==
            std::bit_cast<std::uint64_t>(b.result.best.cost);
    if (!same) mismatches.push_back(label);
  };
  check_model("gp-noiseless", 0.0, 0, 0);
  check_model("gp-noisy", 0.25, 12345, 0);

  std::string summary = "pavings 1d/2d/2d-w2/2d-w4/3d and both gp models";
  if (!mismatches.empty()) {
    summary = "mismatched:";
    for (const auto& m : mismatches) summary += " " + m;
  }
  return {mismatches.empty(), summary + " byte-stable across re-runs"};
}

Outcome criterion9() {
  const ExprPtr tree = parse_sexpr(kVerbatimModel, 1);
  std::size_t ulp_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -3.0 + 6.0 * (static_cast<double>(i) / 999.0);
    const auto v = eval_scalar(*tree, std::vector<double>{x});
    if (!v || std::bit_cast<std::uint64_t>(*v) !=
                  std::bit_cast<std::uint64_t>(damped_sine(x))) {
      ++ulp_mismatches;
    }
  }

  GpConfig basis_source;
  Rng rng(424242);
  std::size_t fixpoint_failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int arity = 1 + static_cast<int>(rng.below(4));
    const ExprPtr t =
        grow_tree(rng, basis_source.basis, 5, arity, -5.0, 5.0);
    const std::string text = format_sexpr(t);
    const ExprPtr back = parse_sexpr(text, arity);
    if (!structurally_equal(*t, *back) || format_sexpr(back) != text) {
      ++fixpoint_failures;
    }
  }
  return {ulp_mismatches == 0 && fixpoint_failures == 0,
          fmt("%zu/1000 grid mismatches vs direct formula, "
              "%zu/10000 round-trip failures",
              ulp_mismatches, fixpoint_failures)};
}

}  // namespace

int main(int argc, char** argv) {
  Outcome (*criteria[])() = {criterion1, criterion2, criterion3,
                             criterion4, criterion5, criterion6,
                             criterion7, criterion8, criterion9};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty()) {
    for (int n = 1; n <= 9; ++n) selected.push_back(n);
  }

  bool all_pass = true;
  for (int n : selected) {
    Outcome outcome;
    try {
      outcome = criteria[n - 1]();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s (%s)\n", n, outcome.pass ? "PASS" : "FAIL",
                outcome.details.c_str());
    std::fflush(stdout);
    all_pass = all_pass && outcome.pass;
  }
  return all_pass ? 0 : 1;
}
