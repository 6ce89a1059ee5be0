#pragma once

#include <functional>
#include <vector>

#include "tslab/expr.hpp"
#include "tslab/timescale.hpp"

namespace tslab {

/// p (+) q = p + q + mu*p*q.
double circle_plus(double p, double q, double mu);
/// (-)p = -p / (1 + mu*p); throws RegressivityError when 1 + mu*p == 0.
double circle_neg(double p, double mu);

struct RegressivityReport {
    bool regressive = false;            // min |1 + mu p| above tolerance
    bool positively_regressive = false; // min (1 + mu p) above tolerance
    double min_over_window = 0.0;       // min of 1 + mu(t) p(t)
    double min_abs_over_window = 0.0;
    double witness_t = 0.0;             // where min(1 + mu p) is attained
};

RegressivityReport is_regressive(const CoefficientExpr& p, const TimeScale& ts,
                                 int per_unit = 64);

/// Sampled rd-continuous function on a time scale: ordered nodes with linear
/// interpolation inside a continuous component. Lookups across gaps are
/// domain errors; every scattered point in the covered range must be a node.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(TimeScale ts, std::vector<double> times,
                 std::vector<std::vector<double>> values);

    static GridFunction sample_scalar(const TimeScale& ts,
                                      const std::function<double(double)>& f,
                                      int per_unit);
    static GridFunction sample_vector(const TimeScale& ts,
                                      const std::function<std::vector<double>(double)>& f,
                                      int per_unit);

    const TimeScale& scale() const { return ts_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::vector<double>>& values() const { return values_; }
    std::size_t dim() const { return values_.empty() ? 0 : values_.front().size(); }
    std::size_t size() const { return times_.size(); }
    double t_front() const;
    double t_back() const;

    /// Index of the node at t (within tol), or -1.
    int node_index(double t, double tol = 1e-9) const;
    bool covers(double t) const;

    std::vector<double> value_at(double t) const;
    double scalar_at(double t) const;

    double max_abs() const;

private:
    TimeScale ts_;
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
};

/// Delta derivative of sampled data: exact jump quotient at right-scattered
/// points, central finite difference (one-sided at component edges) at
/// right-dense points. Scalar data only.
double delta_derivative(const GridFunction& f, double t);
std::vector<double> delta_derivative_vec(const GridFunction& f, double t);

/// Same, evaluating a callable directly (no interpolation error).
double delta_derivative_fn(const std::function<double(double)>& f, const TimeScale& ts,
                           double t);

/// Delta integral of a callable over [a, b) intersected with the scale:
/// mu(s) f(s) over right-scattered atoms plus adaptive-Simpson quadrature on
/// continuous sub-segments. a and b may be arbitrary reals (the trace is
/// clipped); a > b flips the sign.
double delta_integral_fn(const std::function<double(double)>& f, const TimeScale& ts,
                         double a, double b, double tol = 1e-10);

/// Delta integral of sampled data (endpoints must lie in the scale and the
/// covered range). Integrates the piecewise-linear interpolant exactly.
double delta_integral(const GridFunction& f, double a, double b);

/// Generalized exponential e_p(t, s) via the cylinder transform:
/// exp of the delta integral of xi_{mu}(p), xi_h(z) = log(1+hz)/h, xi_0(z)=z.
/// For t < s the reciprocal identity is used. Throws RegressivityError when
/// 1 + mu p <= 0 on the path.
double ts_exp_fn(const std::function<double(double)>& p, const TimeScale& ts,
                 double t, double s, double tol = 1e-12);
double ts_exp(const CoefficientExpr& p, const TimeScale& ts, double t, double s);
/// e_{(-)alpha}(t, s) for constant alpha (= 1 / e_alpha(t, s)).
double ts_exp_ominus(double alpha, const TimeScale& ts, double t, double s);

/// Cumulative cylinder integral on a fixed node grid; O(1) amortized e_p(t,s)
/// queries at node times after O(N) construction.
class ExpIntegrator {
public:
    ExpIntegrator(const TimeScale& ts, std::function<double(double)> p, int per_unit = 64);
    /// exp(I(t) - I(s)); t, s snapped to grid nodes (linear in I between nodes).
    double value(double t, double s) const;

private:
    double cumulative(double t) const;
    std::vector<double> times_;
    std::vector<double> cum_;
};

} // namespace tslab
