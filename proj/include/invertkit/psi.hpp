#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "invertkit/eval.hpp"
#include "invertkit/expr.hpp"
#include "invertkit/interval.hpp"

namespace invertkit {

// Invert model over the adjustment box: find the part of `domain` whose
// image lies in `performance`.
struct InversionProblem {
  ExprVector model;
  Box domain;       // R, dimension = model arity
  Box performance;  // P, dimension = model outputs

  InversionProblem(ExprVector model, Box domain, Box performance);
};

struct PsiConfig {
  double resolution = 1e-3;  // volume threshold, > 0
  std::uint64_t max_boxes = 10'000'000;
  int workers = 1;

  void validate() const;
};

enum class BoxClass { Accept, Reject, Bisect, Boundary };

struct Classification {
  BoxClass kind;
  // mes(Y cap P) / mes(Y); empty when the image is invalid over the box.
  std::optional<double> probability;
};

// The membership probability of a candidate box: image Y, overlap
// I = Y cap P, ratio vol(I)/vol(Y). Zero-volume images fall back to set
// tests: 1 strictly inside P, 0 when disjoint from P, 0.5 otherwise.
// nullopt when the image is invalid.
std::optional<double> probability(const InversionProblem& problem,
                                  const Box& candidate);

// Accept only on Y inside P (closed containment), reject on zero-volume
// overlap, otherwise bisect until the candidate volume drops below the
// resolution, then boundary. Invalid images bisect, never accept.
Classification classify(const InversionProblem& problem,
                        const PsiConfig& config, const Box& candidate);

class MaxBoxesExceeded : public std::runtime_error {
 public:
  MaxBoxesExceeded(Paving partial, std::vector<Box> pending);
  Paving partial;             // classified so far
  std::vector<Box> pending;   // popped-off worklist, unclassified
};

// Depth-first worklist from the full domain; children of a bisection are
// visited in binary-counting order. Deterministic for a fixed problem and
// config. Throws MaxBoxesExceeded past config.max_boxes classifications.
Paving invert(const InversionProblem& problem, const PsiConfig& config);

// Splits the domain into `workers` equal slabs along axis 0 and inverts
// each independently, concatenating pavings in slab order. For power-of-
// two worker counts the slab walk re-enters the single-run bisection grid,
// so point membership matches any other worker count exactly (given a
// resolution below vol(domain) / 2^(n*log2(workers))).
Paving invert_decomposed(const InversionProblem& problem,
                         const PsiConfig& config);

}  // namespace invertkit
