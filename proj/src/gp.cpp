#include "invertkit/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "invertkit/batch_eval.hpp"

namespace invertkit {

int Dataset::arity() const {
  return inputs.empty() ? 0 : static_cast<int>(inputs.front().size());
}

void Dataset::validate() const {
  if (inputs.size() != outputs.size()) {
    throw std::invalid_argument("input and output row counts differ");
  }
  if (inputs.size() < 2) throw std::invalid_argument("need at least 2 rows");
  const std::size_t width = inputs.front().size();
  if (width == 0) throw std::invalid_argument("rows have no input columns");
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    if (inputs[r].size() != width) {
      throw std::invalid_argument("ragged input row " + std::to_string(r + 1));
    }
    for (double v : inputs[r]) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite input in row " +
                                    std::to_string(r + 1));
      }
    }
    if (!std::isfinite(outputs[r])) {
      throw std::invalid_argument("non-finite output in row " +
                                  std::to_string(r + 1));
    }
  }
}

void GpConfig::validate() const {
  if (population_size < 2) throw std::invalid_argument("population too small");
  if (max_depth < 1) throw std::invalid_argument("max depth must be positive");
  if (basis.empty()) throw std::invalid_argument("empty operator basis");
  for (Op op : basis) {
    if (!is_binary(op) && !is_unary(op)) {
      throw std::invalid_argument("basis may only contain operators");
    }
  }
  if (generations < 0) throw std::invalid_argument("negative generation count");
  if (!(target_cost >= 0.0)) throw std::invalid_argument("negative target cost");
  if (tournament_size < 1) throw std::invalid_argument("tournament needs k >= 1");
  const double rates[] = {crossover_rate, mutation_rate, reproduction_rate};
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("rate outside [0, 1]");
  }
  if (std::abs(crossover_rate + mutation_rate + reproduction_rate - 1.0) > 1e-12) {
    throw std::invalid_argument("operator rates must sum to 1");
  }
  if (!(const_lo <= const_hi)) throw std::invalid_argument("empty constant range");
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  if (elite_count < 1) throw std::invalid_argument("elite count must be positive");
  if (elite_merge_population < 2) {
    throw std::invalid_argument("merge population too small");
  }
}

namespace {

ExprPtr grow_node(Rng& rng, const std::vector<Op>& basis, int depth,
                  int max_depth, int arity, double const_lo, double const_hi) {
  if (depth < max_depth && rng.uniform01() < 0.7) {
    const Op op = basis[rng.below(basis.size())];
    ExprPtr left =
        grow_node(rng, basis, depth + 1, max_depth, arity, const_lo, const_hi);
    if (is_unary(op)) return make_unary(op, std::move(left));
    ExprPtr right =
        grow_node(rng, basis, depth + 1, max_depth, arity, const_lo, const_hi);
    return make_binary(op, std::move(left), std::move(right));
  }
  if (rng.uniform01() < 0.5) {
    return make_var(static_cast<int>(rng.below(static_cast<std::uint64_t>(arity))));
  }
  if (rng.uniform01() < 0.5) return make_const(rng.uniform(const_lo, const_hi));
  return make_const(static_cast<double>(rng.below(5) + 1));
}

std::vector<std::vector<double>> columns_of(const Dataset& data) {
  const std::size_t arity = data.inputs.front().size();
  std::vector<std::vector<double>> cols(arity);
  for (auto& c : cols) c.reserve(data.inputs.size());
  for (const auto& row : data.inputs) {
    for (std::size_t a = 0; a < arity; ++a) cols[a].push_back(row[a]);
  }
  return cols;
}

// Shared cost cache; format strings are injective over trees because
// constants print with shortest exact representations.
class CostTable {
 public:
  CostTable(const Dataset& data)
      : eval_(columns_of(data)), targets_(data.outputs) {}

  double operator()(const ExprPtr& e, const std::string& key) {
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double c = eval_.mse(*e, targets_);
    memo_.emplace(key, c);
    return c;
  }

 private:
  BatchEvaluator eval_;
  const std::vector<double>& targets_;
  std::unordered_map<std::string, double> memo_;
};

bool better(const Individual& a, const Individual& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  return a.expr->size < b.expr->size;
}

const Individual& best_of(const std::vector<Individual>& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (better(population[i], population[best])) best = i;
  }
  return population[best];
}

std::vector<Individual> top_of(const std::vector<Individual>& population,
                               int count) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (population[a].cost != population[b].cost) {
      return population[a].cost < population[b].cost;
    }
    if (population[a].expr->size != population[b].expr->size) {
      return population[a].expr->size < population[b].expr->size;
    }
    return a < b;
  });
  const std::size_t n =
      std::min(population.size(), static_cast<std::size_t>(count));
  std::vector<Individual> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(population[order[i]]);
  return out;
}

}  // namespace

ExprPtr grow_tree(Rng& rng, const std::vector<Op>& basis, int max_depth,
                  int arity, double const_lo, double const_hi) {
  if (basis.empty()) throw std::invalid_argument("empty operator basis");
  if (max_depth < 1) throw std::invalid_argument("max depth must be positive");
  if (arity < 1) throw std::invalid_argument("arity must be positive");
  if (!(const_lo <= const_hi)) throw std::invalid_argument("empty constant range");
  return grow_node(rng, basis, 1, max_depth, arity, const_lo, const_hi);
}

double cost(const ExprNode& e, const Dataset& data) {
  data.validate();
  BatchEvaluator eval(columns_of(data));
  return eval.mse(e, data.outputs);
}

const Individual& tournament_select(Rng& rng,
                                    const std::vector<Individual>& population,
                                    int k) {
  if (population.empty()) throw std::invalid_argument("empty population");
  if (k < 1) throw std::invalid_argument("tournament needs k >= 1");
  std::size_t best = rng.below(population.size());
  for (int i = 1; i < k; ++i) {
    const std::size_t draw = rng.below(population.size());
    if (better(population[draw], population[best])) best = draw;
  }
  return population[best];
}

std::pair<ExprPtr, ExprPtr> subtree_crossover(Rng& rng, const ExprPtr& a,
                                              const ExprPtr& b, int max_depth) {
  const int ia = static_cast<int>(rng.below(static_cast<std::uint64_t>(a->size)));
  const int ib = static_cast<int>(rng.below(static_cast<std::uint64_t>(b->size)));
  ExprPtr sub_a = subtree_at(a, ia);
  ExprPtr sub_b = subtree_at(b, ib);
  ExprPtr child_a = replace_at(a, ia, std::move(sub_b));
  ExprPtr child_b = replace_at(b, ib, std::move(sub_a));
  if (child_a->depth > max_depth) child_a = a;
  if (child_b->depth > max_depth) child_b = b;
  return {std::move(child_a), std::move(child_b)};
}

ExprPtr subtree_mutation(Rng& rng, const ExprPtr& a, const GpConfig& config,
                         int arity) {
  const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(a->size)));
  const int remaining = std::max(1, config.max_depth - depth_at(a, i));
  ExprPtr fresh = grow_tree(rng, config.basis, remaining, arity,
                            config.const_lo, config.const_hi);
  return replace_at(a, i, std::move(fresh));
}

EvolveResult evolve_seeded(const Dataset& data, const GpConfig& config,
                           const std::vector<ExprPtr>& seeds) {
  config.validate();
  data.validate();
  const int arity = data.arity();
  const std::size_t target_size = static_cast<std::size_t>(config.population_size);

  Rng rng(config.seed);
  CostTable cost_of(data);

  std::vector<Individual> population;
  population.reserve(target_size);
  std::unordered_set<std::string> seen;
  for (const ExprPtr& s : seeds) {
    if (population.size() == target_size) break;
    if (!s) throw std::invalid_argument("null seed expression");
    if (s->max_var >= arity) {
      throw std::invalid_argument("seed expression exceeds data arity");
    }
    std::string key = format_sexpr(s);
    const double c = cost_of(s, key);
    seen.insert(std::move(key));
    population.push_back({s, c});
  }
  while (population.size() < target_size) {
    // A few retries keep the initial population structurally diverse
    // without risking a stall on tiny search spaces.
    ExprPtr tree;
    std::string key;
    for (int attempt = 0; attempt < 20; ++attempt) {
      tree = grow_tree(rng, config.basis, config.max_depth, arity,
                       config.const_lo, config.const_hi);
      key = format_sexpr(tree);
      if (!seen.contains(key)) break;
    }
    const double c = cost_of(tree, key);
    seen.insert(std::move(key));
    population.push_back({std::move(tree), c});
  }

  Individual best_ever = best_of(population);
  int generation = 0;
  while (generation < config.generations &&
         best_ever.cost > config.target_cost) {
    std::vector<Individual> next;
    next.reserve(target_size);
    next.push_back(best_of(population));
    while (next.size() < target_size) {
      const double u = rng.uniform01();
      if (u < config.crossover_rate) {
        const Individual& p1 =
            tournament_select(rng, population, config.tournament_size);
        const Individual& p2 =
            tournament_select(rng, population, config.tournament_size);
        auto [c1, c2] =
            subtree_crossover(rng, p1.expr, p2.expr, config.max_depth);
        const std::string k1 = format_sexpr(c1);
        const double cost1 = cost_of(c1, k1);
        next.push_back({std::move(c1), cost1});
        if (next.size() < target_size) {
          const std::string k2 = format_sexpr(c2);
          const double cost2 = cost_of(c2, k2);
          next.push_back({std::move(c2), cost2});
        }
      } else if (u < config.crossover_rate + config.mutation_rate) {
        const Individual& p =
            tournament_select(rng, population, config.tournament_size);
        ExprPtr child = subtree_mutation(rng, p.expr, config, arity);
        const std::string k = format_sexpr(child);
        const double c = cost_of(child, k);
        next.push_back({std::move(child), c});
      } else {
        next.push_back(tournament_select(rng, population, config.tournament_size));
      }
    }
    population = std::move(next);
    ++generation;
    const Individual& gen_best = best_of(population);
    if (better(gen_best, best_ever)) best_ever = gen_best;
  }

  EvolveResult result;
  result.best = std::move(best_ever);
  result.elites = top_of(population, config.elite_count);
  result.generations_used = generation;
  result.target_reached = result.best.cost <= config.target_cost;
  return result;
}

EvolveResult evolve(const Dataset& data, const GpConfig& config) {
  return evolve_seeded(data, config, {});
}

std::vector<ExprPtr> collect_elites(const std::vector<EvolveResult>& runs,
                                    int elite_count) {
  std::vector<ExprPtr> merged;
  std::unordered_set<std::string> seen;
  for (int rank = 0; rank < elite_count; ++rank) {
    for (const EvolveResult& run : runs) {
      if (static_cast<std::size_t>(rank) >= run.elites.size()) continue;
      const ExprPtr& e = run.elites[static_cast<std::size_t>(rank)].expr;
      std::string key = format_sexpr(e);
      if (seen.contains(key)) continue;
      seen.insert(std::move(key));
      merged.push_back(e);
    }
  }
  return merged;
}

MultiStartResult multi_start_evolve(const Dataset& data,
                                    const GpConfig& config) {
  config.validate();
  data.validate();

  MultiStartResult result;
  std::vector<EvolveResult> runs;
  runs.reserve(static_cast<std::size_t>(config.restarts));
  for (int i = 0; i < config.restarts; ++i) {
    GpConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(i);
    runs.push_back(evolve(data, run_config));
    const EvolveResult& r = runs.back();
    result.runs.push_back({run_config.seed, r.best.cost, r.generations_used,
                           r.target_reached});
  }

  GpConfig merge_config = config;
  merge_config.seed = config.seed + static_cast<std::uint64_t>(config.restarts);
  merge_config.population_size = config.elite_merge_population;
  const EvolveResult merge = evolve_seeded(
      data, merge_config, collect_elites(runs, config.elite_count));
  result.runs.push_back({merge_config.seed, merge.best.cost,
                         merge.generations_used, merge.target_reached});

  // The merge population starts from every restart best, so its result
  // can only match or improve on them.
  result.best = merge.best;
  result.best_run = static_cast<int>(result.runs.size()) - 1;
  result.target_reached = merge.target_reached;
  return result;
}

}  // namespace invertkit
