#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "invertkit/expr.hpp"
#include "invertkit/rng.hpp"

namespace invertkit {

// Single-output regression samples.
struct Dataset {
  std::vector<std::vector<double>> inputs;  // one point per row
  std::vector<double> outputs;

  int arity() const;
  // Throws std::invalid_argument on ragged rows, non-finite values or
  // fewer than 2 rows.
  void validate() const;
};

struct GpConfig {
  int population_size = 1000;
  int max_depth = 5;
  std::vector<Op> basis = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Exp,
                           Op::Log, Op::Sin, Op::Cos, Op::Tan, Op::Neg};
  int generations = 200;
  double target_cost = 1e-3;
  int tournament_size = 7;
  double crossover_rate = 0.8;
  double mutation_rate = 0.15;
  double reproduction_rate = 0.05;
  double const_lo = -5.0;
  double const_hi = 5.0;
  std::uint64_t seed = 0;
  int restarts = 8;
  int elite_count = 10;            // per-restart carryover into the merge run
  int elite_merge_population = 2000;

  // Throws std::invalid_argument; rates must sum to 1 within 1e-12.
  void validate() const;
};

struct Individual {
  ExprPtr expr;
  double cost = 0.0;  // +inf when any training point is invalid
};

// Random tree of depth <= max_depth. Below the depth cap an operator is
// drawn with probability 0.7, a terminal otherwise; at the cap always a
// terminal. Terminals split evenly between a variable and a constant,
// and constants evenly between uniform [const_lo, const_hi] and the
// integers 1..5.
ExprPtr grow_tree(Rng& rng, const std::vector<Op>& basis, int max_depth,
                  int arity, double const_lo, double const_hi);

// Mean squared error over the dataset; +inf if any point evaluates
// invalid or the error is not finite.
double cost(const ExprNode& e, const Dataset& data);

// Best of k uniform draws, lowest cost first; ties go to the smaller
// tree, then to the earlier draw.
const Individual& tournament_select(Rng& rng,
                                    const std::vector<Individual>& population,
                                    int k);

// Uniform node in each parent, subtrees swapped. A child exceeding
// max_depth is replaced by its own parent.
std::pair<ExprPtr, ExprPtr> subtree_crossover(Rng& rng, const ExprPtr& a,
                                              const ExprPtr& b, int max_depth);

// Uniform node replaced by a fresh grow tree of the remaining depth.
ExprPtr subtree_mutation(Rng& rng, const ExprPtr& a, const GpConfig& config,
                         int arity);

struct EvolveResult {
  Individual best;                 // best ever, across all generations
  std::vector<Individual> elites;  // top of the final generation
  int generations_used = 0;
  bool target_reached = false;
};

// Generational loop: grow init (structural dedup), rate-weighted
// crossover/mutation/reproduction with tournament selection, one elite
// carried over per generation. Stops once best cost <= target_cost.
EvolveResult evolve(const Dataset& data, const GpConfig& config);

// Same loop with a caller-supplied initial population, padded with fresh
// grow trees up to population_size.
EvolveResult evolve_seeded(const Dataset& data, const GpConfig& config,
                           const std::vector<ExprPtr>& seeds);

// Per-restart elites merged into one seed pool, best first, structural
// duplicates dropped.
std::vector<ExprPtr> collect_elites(const std::vector<EvolveResult>& runs,
                                    int elite_count);

struct RunSummary {
  std::uint64_t seed = 0;
  double best_cost = 0.0;
  int generations_used = 0;
  bool target_reached = false;
};

struct MultiStartResult {
  Individual best;
  int best_run = 0;                // index into runs; the merge run is last
  std::vector<RunSummary> runs;    // restarts entries plus the merge run
  bool target_reached = false;
};

// `restarts` independent evolve calls seeded seed+0 .. seed+restarts-1,
// then a final run at elite_merge_population seeded with the merged
// elites (seed+restarts). The result is never worse than any restart.
MultiStartResult multi_start_evolve(const Dataset& data,
                                    const GpConfig& config);

}  // namespace invertkit
