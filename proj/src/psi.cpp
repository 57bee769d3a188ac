#include "invertkit/psi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace invertkit {

InversionProblem::InversionProblem(ExprVector model_in, Box domain_in,
                                   Box performance_in)
    : model(std::move(model_in)),
      domain(std::move(domain_in)),
      performance(std::move(performance_in)) {
  if (domain.dim() != static_cast<std::size_t>(model.arity())) {
    throw std::invalid_argument("domain dimension must match model arity");
  }
  if (performance.dim() != model.outputs()) {
    throw std::invalid_argument(
        "performance dimension must match model outputs");
  }
}

void PsiConfig::validate() const {
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("resolution must be a positive volume");
  }
  if (max_boxes < 1) throw std::invalid_argument("max_boxes must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be positive");
}

namespace {

struct Assessment {
  bool valid = false;
  bool accept = false;
  bool reject = false;
  double p = 0.0;
};

Assessment assess(const InversionProblem& problem, const Box& candidate) {
  Assessment a;
  const auto image = eval_interval(problem.model, candidate);
  if (!image) return a;
  a.valid = true;

  const auto overlap = intersect(*image, problem.performance);
  const double image_volume = image->volume();
  if (image_volume > 0.0) {
    // overlap is a sub-box of the image, so the ratio stays in [0, 1]
    // even under rounding.
    a.p = overlap ? overlap->volume() / image_volume : 0.0;
    a.accept = problem.performance.contains(*image);
    a.reject = !overlap || overlap->volume() == 0.0;
    return a;
  }
  if (problem.performance.contains_strictly(*image)) {
    a.p = 1.0;
    a.accept = true;
  } else if (!overlap) {
    a.p = 0.0;
    a.reject = true;
  } else {
    // Flat image touching the performance boundary: undecidable by
    // volume, so leave it to bisection.
    a.p = 0.5;
  }
  return a;
}

// Pops until the stack drains or the classification budget runs out;
// returns false with the unprocessed tail still on the stack in the
// latter case.
bool run_worklist(const InversionProblem& problem, const PsiConfig& config,
                  std::vector<Box>& stack, Paving& paving,
                  std::uint64_t& classified) {
  while (!stack.empty()) {
    if (classified == config.max_boxes) return false;
    Box box = std::move(stack.back());
    stack.pop_back();
    ++classified;
    const Classification c = classify(problem, config, box);
    switch (c.kind) {
      case BoxClass::Accept:
        paving.accepted.push_back(std::move(box));
        break;
      case BoxClass::Reject:
        paving.rejected.push_back(std::move(box));
        break;
      case BoxClass::Boundary:
        paving.boundary.push_back(std::move(box));
        break;
      case BoxClass::Bisect: {
        std::vector<Box> children = bisect_all(box);
        if (children.empty()) {
          // No axis can split at this width; resolution is finer than
          // the representable grid.
          paving.boundary.push_back(std::move(box));
          break;
        }
        for (auto it = children.rbegin(); it != children.rend(); ++it) {
          stack.push_back(std::move(*it));
        }
        break;
      }
    }
  }
  return true;
}

Paving start_paving(const InversionProblem& problem, const PsiConfig& config) {
  Paving paving;
  paving.resolution = config.resolution;
  paving.model = problem.model.format();
  paving.domain = problem.domain;
  paving.performance = problem.performance;
  return paving;
}

std::vector<Interval> dyadic_pieces(const Interval& ax, int levels) {
  std::vector<Interval> pieces = {ax};
  for (int l = 0; l < levels; ++l) {
    std::vector<Interval> next;
    next.reserve(pieces.size() * 2);
    for (const Interval& p : pieces) {
      const double mid = p.mid();
      if (mid > p.lo() && mid < p.hi()) {
        next.emplace_back(p.lo(), mid);
        next.emplace_back(mid, p.hi());
      } else {
        next.push_back(p);
      }
    }
    pieces = std::move(next);
  }
  return pieces;
}

std::vector<Interval> equal_pieces(const Interval& ax, int count) {
  std::vector<double> edges(static_cast<std::size_t>(count) + 1);
  edges.front() = ax.lo();
  edges.back() = ax.hi();
  for (int i = 1; i < count; ++i) {
    edges[static_cast<std::size_t>(i)] =
        ax.lo() + ax.width() * (static_cast<double>(i) /
                                static_cast<double>(count));
  }
  std::vector<Interval> pieces;
  pieces.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    pieces.emplace_back(edges[static_cast<std::size_t>(i)],
                        edges[static_cast<std::size_t>(i) + 1]);
  }
  return pieces;
}

Box with_axis0(const Box& domain, const Interval& piece) {
  std::vector<Interval> axes = domain.axes();
  axes[0] = piece;
  return Box(std::move(axes));
}

// Level-`levels` grid cells of the slab: the slab piece on axis 0 crossed
// with every combination of the other axes' dyadic pieces, axis 1 fastest.
std::vector<Box> slab_cells(const Box& domain, const Interval& slab,
                            int levels) {
  const std::size_t n = domain.dim();
  std::vector<std::vector<Interval>> per_axis(n);
  per_axis[0] = {slab};
  for (std::size_t a = 1; a < n; ++a) {
    per_axis[a] = dyadic_pieces(domain.axis(a), levels);
  }
  std::size_t total = 1;
  for (std::size_t a = 1; a < n; ++a) total *= per_axis[a].size();

  std::vector<Box> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<Interval> axes(n);
    axes[0] = slab;
    for (std::size_t a = 1; a < n; ++a) axes[a] = per_axis[a][idx[a]];
    cells.emplace_back(std::move(axes));
    for (std::size_t a = 1; a < n; ++a) {
      if (++idx[a] < per_axis[a].size()) break;
      idx[a] = 0;
    }
  }
  return cells;
}

}  // namespace

std::optional<double> probability(const InversionProblem& problem,
                                  const Box& candidate) {
  const Assessment a = assess(problem, candidate);
  if (!a.valid) return std::nullopt;
  return a.p;
}

Classification classify(const InversionProblem& problem,
                        const PsiConfig& config, const Box& candidate) {
  const Assessment a = assess(problem, candidate);
  if (a.valid && a.accept) return {BoxClass::Accept, a.p};
  if (a.valid && a.reject) return {BoxClass::Reject, a.p};
  const BoxClass kind = candidate.volume() >= config.resolution
                            ? BoxClass::Bisect
                            : BoxClass::Boundary;
  if (!a.valid) return {kind, std::nullopt};
  return {kind, a.p};
}

MaxBoxesExceeded::MaxBoxesExceeded(Paving partial_in,
                                   std::vector<Box> pending_in)
    : std::runtime_error("box budget exceeded before the paving completed"),
      partial(std::move(partial_in)),
      pending(std::move(pending_in)) {}

Paving invert(const InversionProblem& problem, const PsiConfig& config) {
  config.validate();
  Paving paving = start_paving(problem, config);
  std::uint64_t classified = 0;
  std::vector<Box> stack = {problem.domain};
  if (!run_worklist(problem, config, stack, paving, classified)) {
    std::reverse(stack.begin(), stack.end());
    throw MaxBoxesExceeded(std::move(paving), std::move(stack));
  }
  return paving;
}

Paving invert_decomposed(const InversionProblem& problem,
                         const PsiConfig& config) {
  config.validate();
  const int workers = config.workers;
  if (workers <= 1) return invert(problem, config);

  const std::size_t n = problem.domain.dim();
  const bool pow2 = (workers & (workers - 1)) == 0;
  int levels = 0;
  if (pow2) {
    for (int w = workers; w > 1; w >>= 1) ++levels;
  }

  const std::vector<Interval> slabs =
      pow2 ? dyadic_pieces(problem.domain.axis(0), levels)
           : equal_pieces(problem.domain.axis(0), workers);

  Paving paving = start_paving(problem, config);
  std::uint64_t classified = 0;
  for (std::size_t s = 0; s < slabs.size(); ++s) {
    const auto pending_from = [&](std::vector<Box> head,
                                  std::size_t next_slab) {
      for (std::size_t r = next_slab; r < slabs.size(); ++r) {
        head.push_back(with_axis0(problem.domain, slabs[r]));
      }
      return head;
    };

    Box slab_box = with_axis0(problem.domain, slabs[s]);
    std::vector<Box> stack;
    if (pow2 && n >= 2) {
      if (classified == config.max_boxes) {
        throw MaxBoxesExceeded(std::move(paving),
                               pending_from({std::move(slab_box)}, s + 1));
      }
      ++classified;
      const Classification c = classify(problem, config, slab_box);
      if (c.kind == BoxClass::Accept) {
        paving.accepted.push_back(std::move(slab_box));
        continue;
      }
      if (c.kind == BoxClass::Reject) {
        paving.rejected.push_back(std::move(slab_box));
        continue;
      }
      if (c.kind == BoxClass::Boundary) {
        paving.boundary.push_back(std::move(slab_box));
        continue;
      }
      // Seed the worklist with the cells a single run reaches after
      // `levels` rounds of full bisection, so the descent below matches
      // it box for box.
      std::vector<Box> cells = slab_cells(problem.domain, slabs[s], levels);
      stack.reserve(cells.size());
      for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
        stack.push_back(std::move(*it));
      }
    } else {
      stack.push_back(std::move(slab_box));
    }

    if (!run_worklist(problem, config, stack, paving, classified)) {
      std::reverse(stack.begin(), stack.end());
      throw MaxBoxesExceeded(std::move(paving),
                             pending_from(std::move(stack), s + 1));
    }
  }
  return paving;
}

}  // namespace invertkit
