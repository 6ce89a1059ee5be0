#pragma once

#include <vector>
#include "tslab/errors.hpp"

namespace tslab {

/// Closed interval [lo, hi]; lo == hi encodes an isolated point.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class Generator { Reals, Integers, StepH, PeriodicUnion, Explicit };

enum class PointClass { RightDense, RightScattered, LeftDense, LeftScattered, Isolated, DenseBoth };

/// A time scale: a closed subset of the reals, represented as the trace of a
/// canonical generator on a finite working window [window_start, window_end].
/// The trace is an ordered union of disjoint closed intervals; degenerate
/// intervals encode isolated points. Values are immutable after construction,
/// so all queries are safe for concurrent use.
///
/// The true scale of the generators extends past the window; "for all t"
/// statements computed here are window-approximate. sigma() at the window
/// maximum returns its argument and is treated as a flagged edge by callers.
class TimeScale {
public:
    static constexpr double kSnapTol = 1e-9;

    /// Empty scale on a degenerate window; queries that need points throw.
    TimeScale() : window_start_(0.0), window_end_(1.0) {}

    static TimeScale reals(double window_start, double window_end);
    static TimeScale integers(double window_start, double window_end);
    static TimeScale step(double h, double window_start, double window_end);
    static TimeScale periodic_union(double on_len, double gap_len,
                                    double window_start, double window_end);
    static TimeScale explicit_scale(std::vector<Interval> parts,
                                    double window_start, double window_end);

    Generator generator() const { return gen_; }
    double param_a() const { return param_a_; }
    double param_b() const { return param_b_; }
    double window_start() const { return window_start_; }
    double window_end() const { return window_end_; }
    const std::vector<Interval>& intervals() const { return intervals_; }

    bool empty() const { return intervals_.empty(); }
    double min_t() const;
    double max_t() const;

    bool contains(double t, double tol = kSnapTol) const;
    /// Nearest scale point within tol of t; throws DomainError otherwise.
    double snap(double t, double tol = kSnapTol) const;

    /// Forward jump: inf{s in T : s > t}; equals t at right-dense points and
    /// at the window maximum.
    double sigma(double t) const;
    /// Backward jump: sup{s in T : s < t}; equals t at left-dense points and
    /// at the window minimum.
    double rho_back(double t) const;
    /// Graininess mu(t) = sigma(t) - t.
    double graininess(double t) const;
    /// Supremum of the graininess, exact from the generator where known.
    double sup_graininess() const;

    PointClass classify(double t) const;

    /// T_tau = T intersect (T - tau), traced on the common window. May be empty.
    TimeScale translate_intersect(double tau) const;
    /// Trace restricted to [lo, hi].
    TimeScale clipped(double lo, double hi) const;

    /// Hausdorff-style max of the two one-sided sup-inf distances, computed
    /// exactly from interval endpoints. +infinity if either side is empty.
    static double distance(const TimeScale& a, const TimeScale& b);

    /// All scattered points plus a uniform fill of `per_unit` points per unit
    /// length of each continuous component (at least 3 per component).
    std::vector<double> sample_points(int per_unit) const;
    /// Right-scattered points of the window trace (window maximum excluded).
    std::vector<double> scattered_points() const;

    double total_dense_length() const;

private:
    void normalize();
    // Index of the interval containing t (within tol), or -1.
    int find_interval(double t, double tol = kSnapTol) const;

    Generator gen_ = Generator::Explicit;
    double param_a_ = 0.0; // StepH: h; PeriodicUnion: on-length
    double param_b_ = 0.0; // PeriodicUnion: gap length
    std::vector<Interval> intervals_;
    double window_start_ = 0.0;
    double window_end_ = 0.0;
};

/// epsilon-translation numbers found in [search_lo, search_hi].
struct TranslationSet {
    double epsilon = 0.0;
    std::vector<double> taus; // sorted ascending
    double search_lo = 0.0;
    double search_hi = 0.0;
};

/// Scans candidate tau over the range at the given step (plus generator-exact
/// candidates such as multiples of the period), keeping those with nonempty
/// T_tau and dist(T, T_tau) <= epsilon. The distance is evaluated on the
/// tau-clipped common window so that pure window truncation does not count
/// against a shift.
TranslationSet translation_numbers(const TimeScale& ts, double epsilon,
                                   double range_lo, double range_hi, double step);

/// Finite approximation of the common core: intersection of T_tau over the
/// supplied shifts. Empty result is returned as an empty scale, not an error.
TimeScale core_intersection(const TimeScale& ts, const std::vector<double>& taus);

} // namespace tslab
