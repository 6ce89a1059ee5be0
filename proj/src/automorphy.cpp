#include "tslab/automorphy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tslab {

namespace {

// Evaluation points: the core's own sample lattice, throttled to the cap.
std::vector<double> eval_points(const TimeScale& core, int cap) {
    double len = core.total_dense_length();
    int per_unit = 16;
    if (len > 0 && len * per_unit > cap) per_unit = std::max(1, int(cap / len));
    std::vector<double> pts = core.sample_points(per_unit);
    if (int(pts.size()) > cap) {
        std::vector<double> out;
        size_t stride = pts.size() / size_t(cap) + 1;
        for (size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
        return out;
    }
    return pts;
}

} // namespace

AutomorphyVerdict test_almost_automorphic(const GridFunction& f,
                                          const TranslationSet& candidates,
                                          const TimeScale& core, double epsilon,
                                          const AutomorphyOptions& opts) {
    AutomorphyVerdict v;
    v.epsilon = epsilon;

    if (f.max_abs() > opts.range_cap) {
        v.note = "range cap exceeded: function treated as unbounded";
        return v;
    }

    std::vector<double> pts;
    for (double e : eval_points(core, opts.max_eval_points))
        if (f.covers(e)) pts.push_back(e);
    if (pts.size() < 2) {
        v.note = "core not covered by the sampled function";
        return v;
    }

    // Domain filter: a shift is usable when every core point translates into
    // the covered window.
    std::vector<double> usable;
    for (double s : candidates.taus) {
        bool ok = true;
        for (double e : pts)
            if (!f.covers(e + s)) { ok = false; break; }
        if (ok) usable.push_back(s);
    }
    if (usable.size() < 2) {
        v.note = "fewer than 2 usable candidates after domain filtering";
        return v;
    }

    // Greedy Cauchy selection in a fixed (ascending) scan order.
    std::vector<double> kept;
    std::vector<std::vector<double>> translates; // one row per kept shift
    for (double s : usable) {
        std::vector<double> row(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) row[i] = f.scalar_at(pts[i] + s);
        bool close = true;
        for (const auto& other : translates) {
            double d = 0.0;
            for (size_t i = 0; i < pts.size(); ++i)
                d = std::max(d, std::fabs(row[i] - other[i]));
            if (d > epsilon / 2) { close = false; break; }
        }
        if (close) {
            kept.push_back(s);
            translates.push_back(std::move(row));
        }
    }
    v.subsequence = kept;
    if (kept.size() < 2) {
        v.note = "no Cauchy subsequence of size >= 2 at epsilon/2";
        return v;
    }

    // Limit function: pointwise average of the kept translates.
    std::vector<std::vector<double>> bar_vals(pts.size(), std::vector<double>(1, 0.0));
    for (size_t i = 0; i < pts.size(); ++i) {
        double acc = 0.0;
        for (const auto& row : translates) acc += row[i];
        bar_vals[i][0] = acc / double(translates.size());
    }
    v.limit_function = GridFunction(core.clipped(pts.front() - 1e-9, pts.back() + 1e-9),
                                    pts, bar_vals);

    double fwd = 0.0;
    for (size_t k = 0; k < kept.size(); ++k)
        for (size_t i = 0; i < pts.size(); ++i)
            fwd = std::max(fwd, std::fabs(translates[k][i] - bar_vals[i][0]));
    v.max_forward_residual = fwd;

    // Back translation: fbar evaluated lazily at t - s_n, wherever all kept
    // translates of that point stay inside the covered window.
    auto fbar = [&](double x, bool& ok) {
        double acc = 0.0;
        for (double s : kept) {
            if (!f.covers(x + s)) { ok = false; return 0.0; }
            acc += f.scalar_at(x + s);
        }
        ok = true;
        return acc / double(kept.size());
    };
    double bwd = 0.0;
    size_t evaluated = 0;
    for (double s : kept)
        for (double e : pts) {
            bool ok = false;
            double val = fbar(e - s, ok);
            if (!ok) continue;
            bwd = std::max(bwd, std::fabs(val - f.scalar_at(e)));
            ++evaluated;
        }
    if (evaluated == 0) {
        bwd = fwd;
        v.note = "no back-translatable points; backward residual repeats forward";
    }
    v.max_backward_residual = bwd;

    v.passed = fwd <= epsilon && bwd <= epsilon;
    return v;
}

AutomorphyVerdict graininess_automorphy_test(const TimeScale& ts,
                                             const TranslationSet& candidates,
                                             double epsilon,
                                             const AutomorphyOptions& opts) {
    // Drop nodes at the window maximum, where sigma (hence mu) is flagged.
    std::vector<double> times;
    std::vector<std::vector<double>> vals;
    double cutoff = ts.max_t() - 1e-9;
    for (double t : ts.sample_points(16)) {
        if (t >= cutoff) continue;
        times.push_back(t);
        vals.push_back({ts.graininess(t)});
    }
    if (times.size() < 2) throw DomainError("graininess test: window too small");
    GridFunction mu(ts.clipped(ts.min_t(), times.back() + 1e-9), times, vals);

    // Core: pull away from both edges by the largest candidate shift.
    double smax = 0.0;
    for (double s : candidates.taus) smax = std::max(smax, std::fabs(s));
    double lo = mu.t_front() + smax, hi = mu.t_back() - smax;
    if (lo >= hi) throw DomainError("graininess test: candidate shifts exceed the window");
    return test_almost_automorphic(mu, candidates, ts.clipped(lo, hi), epsilon, opts);
}

namespace {

std::vector<size_t> common_nodes(const GridFunction& f, const GridFunction& g,
                                 std::vector<size_t>& gi) {
    std::vector<size_t> fi;
    size_t j = 0;
    for (size_t i = 0; i < f.size(); ++i) {
        double t = f.times()[i];
        while (j < g.size() && g.times()[j] < t - 1e-9) ++j;
        if (j < g.size() && std::fabs(g.times()[j] - t) <= 1e-9) {
            fi.push_back(i);
            gi.push_back(j);
        }
    }
    return fi;
}

GridFunction combine(const GridFunction& f, const GridFunction& g,
                     const std::function<double(double, double)>& op) {
    std::vector<size_t> gi;
    std::vector<size_t> fi = common_nodes(f, g, gi);
    if (fi.size() < 2) throw DomainError("pointwise combine: node sets do not align");
    std::vector<double> times;
    std::vector<std::vector<double>> vals;
    for (size_t k = 0; k < fi.size(); ++k) {
        times.push_back(f.times()[fi[k]]);
        vals.push_back({op(f.values()[fi[k]][0], g.values()[gi[k]][0])});
    }
    return GridFunction(f.scale().clipped(times.front() - 1e-9, times.back() + 1e-9),
                        times, vals);
}

} // namespace

GridFunction gf_sum(const GridFunction& f, const GridFunction& g) {
    return combine(f, g, [](double a, double b) { return a + b; });
}

GridFunction gf_product(const GridFunction& f, const GridFunction& g) {
    return combine(f, g, [](double a, double b) { return a * b; });
}

GridFunction gf_scale(const GridFunction& f, double alpha) {
    std::vector<std::vector<double>> vals = f.values();
    for (auto& v : vals) v[0] *= alpha;
    return GridFunction(f.scale(), f.times(), std::move(vals));
}

GridFunction gf_translate(const GridFunction& f, double c) {
    std::vector<double> times;
    std::vector<std::vector<double>> vals;
    for (size_t i = 0; i < f.size(); ++i) {
        double t = f.times()[i] - c;
        if (!f.scale().contains(t)) continue;
        times.push_back(t);
        vals.push_back(f.values()[i]);
    }
    if (times.size() < 2)
        throw DomainError("gf_translate: shifted nodes do not exist in the scale");
    return GridFunction(f.scale().clipped(times.front() - 1e-9, times.back() + 1e-9),
                        times, std::move(vals));
}

GridFunction gf_compose(const GridFunction& f, const std::function<double(double)>& outer) {
    std::vector<std::vector<double>> vals = f.values();
    for (auto& v : vals) v[0] = outer(v[0]);
    return GridFunction(f.scale(), f.times(), std::move(vals));
}

std::vector<double> scan_near_returns(const std::function<double(double)>& f,
                                      double window_lo, double window_hi, double s_min,
                                      double s_max, double coarse_step,
                                      double keep_threshold, int max_keep) {
    if (coarse_step <= 0) throw DomainError("scan_near_returns: step must be positive");
    const int n_probe = 64;
    double probe_hi = window_hi - std::max(0.0, s_max);
    double probe_lo = window_lo - std::min(0.0, s_min);
    if (probe_hi - probe_lo <= 0)
        throw DomainError("scan_near_returns: shift range exceeds the window");
    std::vector<double> probes(n_probe);
    for (int i = 0; i < n_probe; ++i)
        probes[i] = probe_lo + (probe_hi - probe_lo) * (i + 0.5) / n_probe;

    auto residual = [&](double s) {
        double r = 0.0;
        for (double p : probes) r = std::max(r, std::fabs(f(p + s) - f(p)));
        return r;
    };

    // Coarse scan, pick local minima under the threshold, then refine.
    struct Hit { double s, r; };
    std::vector<Hit> hits;
    double prev_r = std::numeric_limits<double>::infinity(), prev_s = 0.0;
    bool descending = false;
    for (double s = s_min; s <= s_max + 1e-12; s += coarse_step) {
        double r = residual(s);
        if (r < prev_r) {
            descending = true;
        } else if (descending) {
            if (prev_r <= keep_threshold) hits.push_back({prev_s, prev_r});
            descending = false;
        }
        prev_r = r;
        prev_s = s;
    }
    if (descending && prev_r <= keep_threshold) hits.push_back({prev_s, prev_r});

    for (auto& h : hits) {
        double step = coarse_step / 2;
        for (int round = 0; round < 20 && step > 1e-10; ++round) {
            double l = residual(h.s - step), rr = residual(h.s + step);
            if (l < h.r && l <= rr) { h.s -= step; h.r = l; }
            else if (rr < h.r) { h.s += step; h.r = rr; }
            else step /= 2;
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.r < b.r; });
    std::vector<double> out;
    for (const auto& h : hits) {
        bool dup = false;
        for (double s : out)
            if (std::fabs(s - h.s) < coarse_step / 2) dup = true;
        if (!dup) out.push_back(h.s);
        if (int(out.size()) >= max_keep) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace tslab
