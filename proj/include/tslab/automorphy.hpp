#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tslab/calculus.hpp"

namespace tslab {

/// Result of the finite almost-automorphy test. The verdict means
/// "numerically almost automorphic at (epsilon, candidate pool)": the limit
/// statement itself is not decidable from finite data.
struct AutomorphyVerdict {
    bool passed = false;
    double epsilon = 0.0;
    GridFunction limit_function;      // averaged translate on the core points
    std::vector<double> subsequence;  // kept shifts
    double max_forward_residual = 0.0;
    double max_backward_residual = 0.0;
    std::string note;
};

struct AutomorphyOptions {
    double range_cap = 1e6; // |f| above this counts as unbounded
    int max_eval_points = 400;
};

/// Greedy subsequence extraction: scan candidates in ascending order, keep
/// those whose translates stay pairwise within epsilon/2 on the core
/// (a finite Cauchy criterion); define the limit function as the average of
/// the kept translates; check the back-translation residual against f for the
/// same kept shifts. Fewer than two kept shifts is a failed verdict.
AutomorphyVerdict test_almost_automorphic(const GridFunction& f,
                                          const TranslationSet& candidates,
                                          const TimeScale& core, double epsilon,
                                          const AutomorphyOptions& opts = {});

/// Runs the tester on the graininess function of the scale (window maximum
/// excluded, where sigma is flagged).
AutomorphyVerdict graininess_automorphy_test(const TimeScale& ts,
                                             const TranslationSet& candidates,
                                             double epsilon,
                                             const AutomorphyOptions& opts = {});

// Construction-level closure operations on node-aligned grids.
GridFunction gf_sum(const GridFunction& f, const GridFunction& g);
GridFunction gf_product(const GridFunction& f, const GridFunction& g);
GridFunction gf_scale(const GridFunction& f, double alpha);
/// g(t) = f(t + c); keeps the nodes whose shifted preimages exist.
GridFunction gf_translate(const GridFunction& f, double c);
GridFunction gf_compose(const GridFunction& f, const std::function<double(double)>& outer);

/// Near-return shifts of a callable: s with sup over probe points of
/// |f(t+s) - f(t)| below the threshold; coarse grid scan plus local
/// refinement. Used to build candidate pools for the tester.
std::vector<double> scan_near_returns(const std::function<double(double)>& f,
                                      double window_lo, double window_hi, double s_min,
                                      double s_max, double coarse_step,
                                      double keep_threshold, int max_keep);

} // namespace tslab
