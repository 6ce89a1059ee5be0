#include "tslab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tslab {

double circle_plus(double p, double q, double mu) { return p + q + mu * p * q; }

double circle_neg(double p, double mu) {
    double d = 1.0 + mu * p;
    if (d == 0.0) throw RegressivityError("circle_neg: 1 + mu*p = 0");
    return -p / d;
}

RegressivityReport is_regressive(const CoefficientExpr& p, const TimeScale& ts, int per_unit) {
    constexpr double kTol = 1e-12;
    RegressivityReport r;
    r.min_over_window = std::numeric_limits<double>::infinity();
    r.min_abs_over_window = std::numeric_limits<double>::infinity();
    for (double t : ts.sample_points(per_unit)) {
        double v = 1.0 + ts.graininess(t) * p.eval(t);
        if (v < r.min_over_window) {
            r.min_over_window = v;
            r.witness_t = t;
        }
        r.min_abs_over_window = std::min(r.min_abs_over_window, std::fabs(v));
    }
    r.regressive = r.min_abs_over_window > kTol;
    r.positively_regressive = r.min_over_window > kTol;
    return r;
}

GridFunction::GridFunction(TimeScale ts, std::vector<double> times,
                           std::vector<std::vector<double>> values)
    : ts_(std::move(ts)), times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() != values_.size())
        throw DomainError("GridFunction: times/values size mismatch");
    if (times_.empty()) throw DomainError("GridFunction: no nodes");
    std::size_t d = values_.front().size();
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (values_[i].size() != d) throw DomainError("GridFunction: inconsistent value dim");
        if (i > 0 && times_[i] <= times_[i - 1])
            throw DomainError("GridFunction: node times not strictly increasing");
        times_[i] = ts_.snap(times_[i]);
    }
    for (double s : ts_.scattered_points())
        if (s >= t_front() - 1e-9 && s <= t_back() + 1e-9 && node_index(s) < 0)
            throw DomainError("GridFunction: scattered point not a node: t=" + std::to_string(s));
}

GridFunction GridFunction::sample_scalar(const TimeScale& ts,
                                         const std::function<double(double)>& f,
                                         int per_unit) {
    std::vector<double> times = ts.sample_points(per_unit);
    std::vector<std::vector<double>> vals;
    vals.reserve(times.size());
    for (double t : times) vals.push_back({f(t)});
    return GridFunction(ts, std::move(times), std::move(vals));
}

GridFunction GridFunction::sample_vector(const TimeScale& ts,
                                         const std::function<std::vector<double>(double)>& f,
                                         int per_unit) {
    std::vector<double> times = ts.sample_points(per_unit);
    std::vector<std::vector<double>> vals;
    vals.reserve(times.size());
    for (double t : times) vals.push_back(f(t));
    return GridFunction(ts, std::move(times), std::move(vals));
}

double GridFunction::t_front() const { return times_.front(); }
double GridFunction::t_back() const { return times_.back(); }

int GridFunction::node_index(double t, double tol) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it != times_.end() && std::fabs(*it - t) <= tol) return int(it - times_.begin());
    return -1;
}

bool GridFunction::covers(double t) const {
    if (!ts_.contains(t)) return false;
    if (t < t_front() - 1e-9 || t > t_back() + 1e-9) return false;
    return true;
}

std::vector<double> GridFunction::value_at(double t) const {
    int idx = node_index(t);
    if (idx >= 0) return values_[size_t(idx)];
    if (!covers(t))
        throw DomainError("GridFunction lookup outside covered range: t=" + std::to_string(t));
    // Interior of a continuous component: interpolate between neighbors that
    // share the component with t. Scattered points are nodes, so the bracket
    // cannot silently span a gap; reject if it does.
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin() || it == times_.end())
        throw DomainError("GridFunction lookup outside node range: t=" + std::to_string(t));
    size_t hi = size_t(it - times_.begin());
    size_t lo = hi - 1;
    double tl = times_[lo], th = times_[hi];
    if (ts_.sigma(tl) > tl + 1e-9 || ts_.rho_back(th) < th - 1e-9)
        throw DomainError("GridFunction lookup across a gap: t=" + std::to_string(t));
    double w = (t - tl) / (th - tl);
    std::vector<double> out(values_[lo].size());
    for (size_t k = 0; k < out.size(); ++k)
        out[k] = (1.0 - w) * values_[lo][k] + w * values_[hi][k];
    return out;
}

double GridFunction::scalar_at(double t) const {
    auto v = value_at(t);
    if (v.size() != 1) throw DomainError("scalar_at on non-scalar grid");
    return v[0];
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_)
        for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> delta_derivative_vec(const GridFunction& f, double t) {
    const TimeScale& ts = f.scale();
    double tt = ts.snap(t);
    double s = ts.sigma(tt);
    double mu = s - tt;
    if (mu > 1e-9) {
        auto a = f.value_at(s);
        auto b = f.value_at(tt);
        for (size_t k = 0; k < a.size(); ++k) a[k] = (a[k] - b[k]) / mu;
        return a;
    }
    if (tt >= ts.max_t() - 1e-9)
        throw DomainError("delta_derivative at flagged window edge: t=" + std::to_string(t));
    // Right-dense: finite difference inside the component.
    double h = std::max(1e-6, 1e-8 * std::fabs(tt));
    double lo = ts.rho_back(tt) < tt - 1e-9 ? tt : -std::numeric_limits<double>::infinity();
    // Component bounds
    double clo = tt, chi = tt;
    for (const auto& iv : ts.intervals())
        if (tt >= iv.lo - 1e-9 && tt <= iv.hi + 1e-9) { clo = iv.lo; chi = iv.hi; break; }
    (void)lo;
    clo = std::max(clo, f.t_front());
    chi = std::min(chi, f.t_back());
    auto at = [&](double x) { return f.value_at(x); };
    std::vector<double> out;
    if (tt - h >= clo && tt + h <= chi) {
        auto a = at(tt + h), b = at(tt - h);
        out.resize(a.size());
        for (size_t k = 0; k < a.size(); ++k) out[k] = (a[k] - b[k]) / (2 * h);
    } else if (tt + 2 * h <= chi) { // one-sided, second order
        auto f0 = at(tt), f1 = at(tt + h), f2 = at(tt + 2 * h);
        out.resize(f0.size());
        for (size_t k = 0; k < f0.size(); ++k)
            out[k] = (-3 * f0[k] + 4 * f1[k] - f2[k]) / (2 * h);
    } else if (tt - 2 * h >= clo) {
        auto f0 = at(tt), f1 = at(tt - h), f2 = at(tt - 2 * h);
        out.resize(f0.size());
        for (size_t k = 0; k < f0.size(); ++k)
            out[k] = (3 * f0[k] - 4 * f1[k] + f2[k]) / (2 * h);
    } else {
        throw DomainError("delta_derivative: component too short for finite differences");
    }
    return out;
}

double delta_derivative(const GridFunction& f, double t) {
    auto v = delta_derivative_vec(f, t);
    if (v.size() != 1) throw DomainError("delta_derivative on non-scalar grid");
    return v[0];
}

double delta_derivative_fn(const std::function<double(double)>& f, const TimeScale& ts,
                           double t) {
    double tt = ts.snap(t);
    double s = ts.sigma(tt);
    double mu = s - tt;
    if (mu > 1e-9) return (f(s) - f(tt)) / mu;
    if (tt >= ts.max_t() - 1e-9)
        throw DomainError("delta_derivative at flagged window edge");
    double h = std::max(1e-6, 1e-8 * std::fabs(tt));
    double clo = tt, chi = tt;
    for (const auto& iv : ts.intervals())
        if (tt >= iv.lo - 1e-9 && tt <= iv.hi + 1e-9) { clo = iv.lo; chi = iv.hi; break; }
    if (tt - h >= clo && tt + h <= chi) return (f(tt + h) - f(tt - h)) / (2 * h);
    if (tt + 2 * h <= chi) return (-3 * f(tt) + 4 * f(tt + h) - f(tt + 2 * h)) / (2 * h);
    if (tt - 2 * h >= clo) return (3 * f(tt) - 4 * f(tt - h) + f(tt - 2 * h)) / (2 * h);
    throw DomainError("delta_derivative: component too short for finite differences");
}

namespace {

double simpson_panel(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson_panel(a, fa, flm, m, fm);
    double right = simpson_panel(m, fm, frm, b, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}

double integrate_segment(const std::function<double(double)>& f, double a, double b,
                         double tol) {
    if (b - a <= 0) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson_panel(a, fa, fm, b, fb);
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

} // namespace

double delta_integral_fn(const std::function<double(double)>& f, const TimeScale& ts,
                         double a, double b, double tol) {
    if (a > b) return -delta_integral_fn(f, ts, b, a, tol);
    constexpr double kTol = 1e-12;
    if (b - a <= kTol) return 0.0;
    double total = 0.0;
    const auto& ivs = ts.intervals();
    for (size_t i = 0; i < ivs.size(); ++i) {
        const auto& iv = ivs[i];
        if (iv.hi < a - kTol) continue;
        if (iv.lo > b + kTol) break;
        double lo = std::max(iv.lo, a), hi = std::min(iv.hi, b);
        if (hi - lo > kTol) total += integrate_segment(f, lo, hi, tol);
        // Right-scattered atom at iv.hi carries weight mu = next.lo - iv.hi.
        if (i + 1 < ivs.size() && iv.hi >= a - kTol && iv.hi < b - kTol) {
            double mu = ivs[i + 1].lo - iv.hi;
            total += mu * f(iv.hi);
        }
    }
    return total;
}

double delta_integral(const GridFunction& f, double a, double b) {
    const TimeScale& ts = f.scale();
    double aa = ts.snap(a), bb = ts.snap(b);
    if (aa > bb) throw DomainError("delta_integral: a > b");
    if (!f.covers(aa) || !f.covers(bb))
        throw DomainError("delta_integral: nodes do not cover [a,b]");
    return delta_integral_fn([&](double t) { return f.scalar_at(t); }, ts, aa, bb, 1e-12);
}

double ts_exp_fn(const std::function<double(double)>& p, const TimeScale& ts, double t,
                 double s, double tol) {
    double tt = ts.snap(t), ss = ts.snap(s);
    if (tt == ss) return 1.0;
    if (tt < ss) return 1.0 / ts_exp_fn(p, ts, ss, tt, tol);
    double acc = 0.0;
    constexpr double kTol = 1e-12;
    const auto& ivs = ts.intervals();
    for (size_t i = 0; i < ivs.size(); ++i) {
        const auto& iv = ivs[i];
        if (iv.hi < ss - kTol) continue;
        if (iv.lo > tt + kTol) break;
        double lo = std::max(iv.lo, ss), hi = std::min(iv.hi, tt);
        if (hi - lo > kTol) acc += integrate_segment(p, lo, hi, tol);
        if (i + 1 < ivs.size() && iv.hi >= ss - kTol && iv.hi < tt - kTol) {
            double mu = ivs[i + 1].lo - iv.hi;
            double w = 1.0 + mu * p(iv.hi);
            if (w <= 0.0)
                throw RegressivityError("ts_exp: 1 + mu*p <= 0 at t=" + std::to_string(iv.hi));
            acc += std::log(w);
        }
    }
    return std::exp(acc);
}

double ts_exp(const CoefficientExpr& p, const TimeScale& ts, double t, double s) {
    return ts_exp_fn([&](double u) { return p.eval(u); }, ts, t, s);
}

double ts_exp_ominus(double alpha, const TimeScale& ts, double t, double s) {
    return 1.0 / ts_exp_fn([alpha](double) { return alpha; }, ts, t, s);
}

ExpIntegrator::ExpIntegrator(const TimeScale& ts, std::function<double(double)> p,
                             int per_unit) {
    times_ = ts.sample_points(per_unit);
    cum_.assign(times_.size(), 0.0);
    for (size_t k = 0; k + 1 < times_.size(); ++k) {
        double a = times_[k], b = times_[k + 1];
        double sig = ts.sigma(a);
        double step;
        if (sig > a + 1e-9) {
            // scattered jump: b should be sigma(a)
            double mu = sig - a;
            double w = 1.0 + mu * p(a);
            if (w <= 0.0)
                throw RegressivityError("ExpIntegrator: 1 + mu*p <= 0 at t=" + std::to_string(a));
            step = std::log(w);
        } else {
            step = integrate_segment(p, a, b, 1e-12);
        }
        cum_[k + 1] = cum_[k] + step;
    }
}

double ExpIntegrator::cumulative(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - 1e-9);
    if (it == times_.end()) return cum_.back();
    size_t i = size_t(it - times_.begin());
    if (std::fabs(times_[i] - t) <= 1e-9 || i == 0) return cum_[i];
    double tl = times_[i - 1], th = times_[i];
    double w = (t - tl) / (th - tl);
    return (1.0 - w) * cum_[i - 1] + w * cum_[i];
}

double ExpIntegrator::value(double t, double s) const {
    return std::exp(cumulative(t) - cumulative(s));
}

} // namespace tslab
