#include "tslab/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool interval_lt(const Interval& a, const Interval& b) { return a.lo < b.lo; }
} // namespace

void TimeScale::normalize() {
    if (window_start_ >= window_end_)
        throw DomainError("window_start must be < window_end");
    std::sort(intervals_.begin(), intervals_.end(), interval_lt);
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
        if (iv.lo > iv.hi)
            throw DomainError("interval with lo > hi");
        if (iv.hi < window_start_ - kSnapTol || iv.lo > window_end_ + kSnapTol)
            continue;
        Interval c{std::max(iv.lo, window_start_), std::min(iv.hi, window_end_)};
        if (c.lo > c.hi) c.hi = c.lo; // clipped to a window-edge point
        if (!merged.empty() && c.lo <= merged.back().hi + kSnapTol)
            merged.back().hi = std::max(merged.back().hi, c.hi);
        else
            merged.push_back(c);
    }
    intervals_ = std::move(merged);
}

TimeScale TimeScale::reals(double ws, double we) {
    TimeScale ts;
    ts.gen_ = Generator::Reals;
    ts.window_start_ = ws;
    ts.window_end_ = we;
    ts.intervals_ = {{ws, we}};
    ts.normalize();
    return ts;
}

TimeScale TimeScale::integers(double ws, double we) {
    TimeScale ts;
    ts.gen_ = Generator::Integers;
    ts.window_start_ = ws;
    ts.window_end_ = we;
    if (ws >= we) throw DomainError("window_start must be < window_end");
    for (double k = std::ceil(ws - kSnapTol); k <= std::floor(we + kSnapTol); k += 1.0)
        ts.intervals_.push_back({k, k});
    ts.normalize();
    if (ts.empty()) throw DomainError("integer trace empty on window");
    return ts;
}

TimeScale TimeScale::step(double h, double ws, double we) {
    if (h <= 0) throw DomainError("step h must be positive");
    TimeScale ts;
    ts.gen_ = Generator::StepH;
    ts.param_a_ = h;
    ts.window_start_ = ws;
    ts.window_end_ = we;
    if (ws >= we) throw DomainError("window_start must be < window_end");
    for (double k = std::ceil(ws / h - kSnapTol); k * h <= we + kSnapTol; k += 1.0)
        ts.intervals_.push_back({k * h, k * h});
    ts.normalize();
    if (ts.empty()) throw DomainError("step trace empty on window");
    return ts;
}

TimeScale TimeScale::periodic_union(double a, double b, double ws, double we) {
    if (a <= 0) throw DomainError("on-length a must be positive");
    if (b < 0) throw DomainError("gap length b must be nonnegative");
    TimeScale ts;
    ts.gen_ = Generator::PeriodicUnion;
    ts.param_a_ = a;
    ts.param_b_ = b;
    ts.window_start_ = ws;
    ts.window_end_ = we;
    const double period = a + b;
    for (double k = std::floor((ws - a) / period) - 1; k * period <= we + kSnapTol; k += 1.0)
        ts.intervals_.push_back({k * period, k * period + a});
    ts.normalize();
    if (ts.empty()) throw DomainError("periodic-union trace empty on window");
    return ts;
}

TimeScale TimeScale::explicit_scale(std::vector<Interval> parts, double ws, double we) {
    TimeScale ts;
    ts.gen_ = Generator::Explicit;
    ts.window_start_ = ws;
    ts.window_end_ = we;
    ts.intervals_ = std::move(parts);
    ts.normalize();
    return ts;
}

double TimeScale::min_t() const {
    if (empty()) throw DomainError("empty time scale has no minimum");
    return intervals_.front().lo;
}

double TimeScale::max_t() const {
    if (empty()) throw DomainError("empty time scale has no maximum");
    return intervals_.back().hi;
}

int TimeScale::find_interval(double t, double tol) const {
    // First interval with lo > t, then step back.
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), Interval{t, t},
                               interval_lt);
    if (it != intervals_.begin()) {
        const auto& prev = *(it - 1);
        if (t <= prev.hi + tol) return int(it - intervals_.begin()) - 1;
    }
    if (it != intervals_.end() && t >= it->lo - tol)
        return int(it - intervals_.begin());
    return -1;
}

bool TimeScale::contains(double t, double tol) const {
    return find_interval(t, tol) >= 0;
}

double TimeScale::snap(double t, double tol) const {
    int i = find_interval(t, tol);
    if (i < 0) throw DomainError("point not in time scale: t=" + std::to_string(t));
    const auto& iv = intervals_[size_t(i)];
    return std::clamp(t, iv.lo, iv.hi);
}

double TimeScale::sigma(double t) const {
    int i = find_interval(t);
    if (i < 0) throw DomainError("sigma: point not in time scale: t=" + std::to_string(t));
    const auto& iv = intervals_[size_t(i)];
    double tt = std::clamp(t, iv.lo, iv.hi);
    if (tt < iv.hi - kSnapTol) return tt;                  // right-dense
    if (size_t(i) + 1 < intervals_.size()) return intervals_[size_t(i) + 1].lo;
    return iv.hi; // window maximum; flagged edge
}

double TimeScale::rho_back(double t) const {
    int i = find_interval(t);
    if (i < 0) throw DomainError("rho: point not in time scale: t=" + std::to_string(t));
    const auto& iv = intervals_[size_t(i)];
    double tt = std::clamp(t, iv.lo, iv.hi);
    if (tt > iv.lo + kSnapTol) return tt;                  // left-dense
    if (i > 0) return intervals_[size_t(i) - 1].hi;
    return iv.lo; // window minimum
}

double TimeScale::graininess(double t) const {
    double s = sigma(t);
    double tt = snap(t);
    return std::max(0.0, s - tt);
}

double TimeScale::sup_graininess() const {
    switch (gen_) {
        case Generator::Reals: return 0.0;
        case Generator::Integers: return 1.0;
        case Generator::StepH: return param_a_;
        case Generator::PeriodicUnion: return param_b_;
        case Generator::Explicit: {
            double g = 0.0;
            for (size_t i = 0; i + 1 < intervals_.size(); ++i)
                g = std::max(g, intervals_[i + 1].lo - intervals_[i].hi);
            return g;
        }
    }
    return 0.0;
}

PointClass TimeScale::classify(double t) const {
    double tt = snap(t);
    bool at_min = tt <= min_t() + kSnapTol;
    bool at_max = tt >= max_t() - kSnapTol;
    bool right_scattered = !at_max && sigma(tt) > tt + kSnapTol;
    bool left_scattered = !at_min && rho_back(tt) < tt - kSnapTol;
    if (at_min) return right_scattered ? PointClass::RightScattered : PointClass::RightDense;
    if (at_max) return left_scattered ? PointClass::LeftScattered : PointClass::LeftDense;
    if (right_scattered && left_scattered) return PointClass::Isolated;
    if (right_scattered) return PointClass::RightScattered;
    if (left_scattered) return PointClass::LeftScattered;
    return PointClass::DenseBoth;
}

TimeScale TimeScale::clipped(double lo, double hi) const {
    TimeScale out;
    out.gen_ = Generator::Explicit;
    out.window_start_ = lo;
    out.window_end_ = hi;
    if (lo >= hi) { out.window_end_ = lo + 1.0; return out; } // empty
    out.intervals_ = intervals_;
    out.normalize();
    return out;
}

TimeScale TimeScale::translate_intersect(double tau) const {
    double lo = std::max(window_start_, window_start_ - tau);
    double hi = std::min(window_end_, window_end_ - tau);
    TimeScale out;
    out.gen_ = Generator::Explicit;
    out.window_start_ = lo;
    out.window_end_ = (lo < hi) ? hi : lo + 1.0;
    if (lo >= hi) return out; // empty: windows do not overlap
    // Intersect the interval unions of T and T - tau.
    size_t i = 0, j = 0;
    while (i < intervals_.size() && j < intervals_.size()) {
        Interval a = intervals_[i];
        Interval b{intervals_[j].lo - tau, intervals_[j].hi - tau};
        double l = std::max(a.lo, b.lo), h = std::min(a.hi, b.hi);
        if (l <= h + kSnapTol) out.intervals_.push_back({l, std::max(l, h)});
        if (a.hi < b.hi) ++i; else ++j;
    }
    out.normalize();
    return out;
}

namespace {
// inf over s in B of |t - s|, B a normalized union of intervals.
double point_set_distance(double t, const std::vector<Interval>& B) {
    if (B.empty()) return kInf;
    auto it = std::upper_bound(B.begin(), B.end(), Interval{t, t}, interval_lt);
    double d = kInf;
    if (it != B.end()) d = std::min(d, std::max(0.0, it->lo - t));
    if (it != B.begin()) {
        const auto& prev = *(it - 1);
        d = std::min(d, std::max(0.0, t - prev.hi));
    }
    return d;
}

// sup over t in A of inf over s in B |t - s|: exact via endpoint/gap-midpoint
// candidates (the distance-to-B function is piecewise linear with peaks at
// midpoints of B's gaps).
double one_sided_sup(const std::vector<Interval>& A, const std::vector<Interval>& B) {
    if (A.empty()) return 0.0;
    if (B.empty()) return kInf;
    std::vector<double> peaks;
    peaks.reserve(B.size());
    for (size_t i = 0; i + 1 < B.size(); ++i)
        peaks.push_back(0.5 * (B[i].hi + B[i + 1].lo));
    double best = 0.0;
    size_t p = 0;
    for (const auto& iv : A) {
        best = std::max(best, point_set_distance(iv.lo, B));
        best = std::max(best, point_set_distance(iv.hi, B));
        while (p < peaks.size() && peaks[p] < iv.lo) ++p;
        for (size_t q = p; q < peaks.size() && peaks[q] <= iv.hi; ++q)
            best = std::max(best, point_set_distance(peaks[q], B));
    }
    return best;
}
} // namespace

double TimeScale::distance(const TimeScale& a, const TimeScale& b) {
    if (a.empty() || b.empty()) return kInf;
    return std::max(one_sided_sup(a.intervals_, b.intervals_),
                    one_sided_sup(b.intervals_, a.intervals_));
}

std::vector<double> TimeScale::sample_points(int per_unit) const {
    std::vector<double> pts;
    for (const auto& iv : intervals_) {
        if (iv.hi - iv.lo <= kSnapTol) {
            pts.push_back(iv.lo);
            continue;
        }
        int n = std::max(3, int(std::ceil((iv.hi - iv.lo) * per_unit)) + 1);
        for (int k = 0; k < n; ++k)
            pts.push_back(iv.lo + (iv.hi - iv.lo) * k / (n - 1));
    }
    return pts;
}

std::vector<double> TimeScale::scattered_points() const {
    std::vector<double> pts;
    for (size_t i = 0; i + 1 < intervals_.size(); ++i)
        pts.push_back(intervals_[i].hi);
    return pts;
}

double TimeScale::total_dense_length() const {
    double len = 0.0;
    for (const auto& iv : intervals_) len += iv.hi - iv.lo;
    return len;
}

TranslationSet translation_numbers(const TimeScale& ts, double epsilon,
                                   double range_lo, double range_hi, double step) {
    if (step <= 0) throw DomainError("translation_numbers: step must be positive");
    TranslationSet out;
    out.epsilon = epsilon;
    out.search_lo = range_lo;
    out.search_hi = range_hi;

    std::vector<double> candidates;
    for (double tau = range_lo; tau <= range_hi + 1e-12; tau += step)
        candidates.push_back(tau);
    // Generator-exact candidates so periodic scales report exact zeros.
    double period = 0.0;
    switch (ts.generator()) {
        case Generator::Integers: period = 1.0; break;
        case Generator::StepH: period = ts.param_a(); break;
        case Generator::PeriodicUnion: period = ts.param_a() + ts.param_b(); break;
        default: break;
    }
    if (period > 0.0)
        for (double k = std::ceil(range_lo / period); k * period <= range_hi + 1e-12; k += 1.0)
            candidates.push_back(k * period);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                     candidates.end());

    for (double tau : candidates) {
        TimeScale shifted = ts.translate_intersect(tau);
        if (shifted.empty()) continue;
        // Fair comparison window: where both T and T - tau are traced.
        double lo = std::max(ts.window_start(), ts.window_start() - tau);
        double hi = std::min(ts.window_end(), ts.window_end() - tau);
        if (lo >= hi) continue;
        TimeScale base_c = ts.clipped(lo, hi);
        TimeScale shift_c = shifted.clipped(lo, hi);
        if (base_c.empty() || shift_c.empty()) continue;
        if (TimeScale::distance(base_c, shift_c) <= epsilon + 1e-12)
            out.taus.push_back(tau);
    }
    return out;
}

TimeScale core_intersection(const TimeScale& ts, const std::vector<double>& taus) {
    if (taus.empty()) return ts;
    std::vector<Interval> acc = ts.translate_intersect(taus.front()).intervals();
    double lo = std::max(ts.window_start(), ts.window_start() - taus.front());
    double hi = std::min(ts.window_end(), ts.window_end() - taus.front());
    for (size_t n = 1; n < taus.size(); ++n) {
        TimeScale next = ts.translate_intersect(taus[n]);
        lo = std::max(lo, next.window_start());
        hi = std::min(hi, next.window_end());
        std::vector<Interval> merged;
        const auto& b = next.intervals();
        size_t i = 0, j = 0;
        while (i < acc.size() && j < b.size()) {
            double l = std::max(acc[i].lo, b[j].lo), h = std::min(acc[i].hi, b[j].hi);
            if (l <= h + TimeScale::kSnapTol) merged.push_back({l, std::max(l, h)});
            if (acc[i].hi < b[j].hi) ++i; else ++j;
        }
        acc = std::move(merged);
        if (acc.empty()) break;
    }
    if (lo >= hi || acc.empty()) {
        // Empty core, signaled as an empty scale on a degenerate window.
        return TimeScale::explicit_scale({}, std::min(lo, hi), std::min(lo, hi) + 1.0);
    }
    return TimeScale::explicit_scale(std::move(acc), lo, hi);
}

} // namespace tslab
