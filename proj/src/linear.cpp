#include "tslab/linear.hpp"

#include <algorithm>
#include <cmath>

namespace tslab {

namespace {

// RK4 node layout: every isolated point, and each continuous component cut
// into max(64, 16*ceil(len)) steps.
std::vector<double> rk_grid(const TimeScale& ts) {
    std::vector<double> t;
    for (const auto& iv : ts.intervals()) {
        double len = iv.hi - iv.lo;
        if (len <= TimeScale::kSnapTol) {
            t.push_back(iv.lo);
            continue;
        }
        int n = std::max(64, 16 * int(std::ceil(len)));
        for (int k = 0; k <= n; ++k) t.push_back(iv.lo + len * k / n);
    }
    return t;
}

std::vector<double> flatten(const Eigen::MatrixXd& m) {
    std::vector<double> v(size_t(m.rows() * m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v[size_t(i * m.cols() + j)] = m(i, j);
    return v;
}

Eigen::MatrixXd unflatten(const std::vector<double>& v, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[size_t(i * n + j)];
    return m;
}

// Cumulative cylinder integral of p over an explicit node chain.
std::vector<double> cumulative_cylinder(const TimeScale& ts,
                                        const std::function<double(double)>& p,
                                        const std::vector<double>& times) {
    std::vector<double> cum(times.size(), 0.0);
    for (size_t k = 0; k + 1 < times.size(); ++k) {
        double a = times[k], b = times[k + 1];
        double sig = ts.sigma(a);
        double step;
        if (sig > a + 1e-9) {
            double mu = sig - a;
            double w = 1.0 + mu * p(a);
            if (w <= 0.0)
                throw RegressivityError("cylinder integral: 1 + mu*p <= 0 at t=" +
                                        std::to_string(a));
            step = std::log(w);
        } else {
            step = delta_integral_fn(p, ts, a, b, 1e-12);
        }
        cum[k + 1] = cum[k] + step;
    }
    return cum;
}

Eigen::MatrixXd rk4_matrix_step(const std::function<Eigen::MatrixXd(double)>& A, double t,
                                double h, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd k1 = A(t) * x;
    Eigen::MatrixXd k2 = A(t + h / 2) * (x + h / 2 * k1);
    Eigen::MatrixXd k3 = A(t + h / 2) * (x + h / 2 * k2);
    Eigen::MatrixXd k4 = A(t + h) * (x + h * k3);
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

Eigen::VectorXd rk4_vector_step(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& g, double t,
    double h, const Eigen::VectorXd& x) {
    Eigen::VectorXd k1 = g(t, x);
    Eigen::VectorXd k2 = g(t + h / 2, x + h / 2 * k1);
    Eigen::VectorXd k3 = g(t + h / 2, x + h / 2 * k2);
    Eigen::VectorXd k4 = g(t + h, x + h * k3);
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

} // namespace

LinearSystem::LinearSystem(std::vector<std::vector<CoefficientExpr>> A,
                           std::vector<CoefficientExpr> f, TimeScale ts)
    : n_(int(A.size())), A_(std::move(A)), f_(std::move(f)), ts_(std::move(ts)) {
    if (n_ == 0) throw DomainError("LinearSystem: empty matrix");
    for (const auto& row : A_)
        if (int(row.size()) != n_) throw DomainError("LinearSystem: A must be square");
    if (int(f_.size()) != n_) throw DomainError("LinearSystem: f dimension mismatch");
    for (double s : ts_.scattered_points()) {
        double mu = ts_.graininess(s);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n_, n_) + mu * A_at(s);
        double d = std::fabs(m.determinant());
        worst_det_ = std::min(worst_det_, d);
    }
    regressive_ = worst_det_ > 1e-12;
}

Eigen::MatrixXd LinearSystem::A_at(double t) const {
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(i, j) = A_[size_t(i)][size_t(j)].eval(t);
    return m;
}

Eigen::VectorXd LinearSystem::f_at(double t) const {
    Eigen::VectorXd v(n_);
    for (int i = 0; i < n_; ++i) v(i) = f_[size_t(i)].eval(t);
    return v;
}

Eigen::MatrixXd grid_matrix_at(const GridFunction& g, double t, int n) {
    return unflatten(g.value_at(t), n);
}

GridFunction fundamental_matrix(const LinearSystem& sys, double t0) {
    if (!sys.regressive())
        throw RegressivityError("fundamental_matrix: I + mu A singular on the window");
    const TimeScale& ts = sys.scale();
    std::vector<double> times = rk_grid(ts);
    double anchor_t = ts.snap(t0);
    size_t anchor = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < times.size(); ++i) {
        double d = std::fabs(times[i] - anchor_t);
        if (d < best) { best = d; anchor = i; }
    }
    const int n = sys.dimension();
    auto A = [&](double u) { return sys.A_at(u); };
    std::vector<Eigen::MatrixXd> X(times.size());
    X[anchor] = Eigen::MatrixXd::Identity(n, n);
    for (size_t k = anchor; k + 1 < times.size(); ++k) {
        double t = times[k], next = times[k + 1];
        double sig = ts.sigma(t);
        if (sig > t + 1e-9) {
            double mu = sig - t;
            X[k + 1] = (Eigen::MatrixXd::Identity(n, n) + mu * sys.A_at(t)) * X[k];
        } else {
            X[k + 1] = rk4_matrix_step(A, t, next - t, X[k]);
        }
    }
    for (size_t k = anchor; k > 0; --k) {
        double prev = times[k - 1];
        double sig = ts.sigma(prev);
        if (sig > prev + 1e-9) {
            double mu = sig - prev;
            Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + mu * sys.A_at(prev);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
            if (!lu.isInvertible())
                throw RegressivityError("fundamental_matrix: I + mu A singular at t=" +
                                        std::to_string(prev));
            X[k - 1] = lu.solve(X[k]);
        } else {
            X[k - 1] = rk4_matrix_step(A, times[k], prev - times[k], X[k]);
        }
    }
    std::vector<std::vector<double>> vals(times.size());
    for (size_t k = 0; k < times.size(); ++k) vals[k] = flatten(X[k]);
    return GridFunction(ts, times, vals);
}

DichotomyReport check_dichotomy(const LinearSystem& sys, const DichotomyData& data,
                                int sample_pairs) {
    const TimeScale& ts = sys.scale();
    const int n = sys.dimension();
    const auto& times = data.fundamental.times();
    const size_t N = times.size();
    if (N < 2) throw DomainError("check_dichotomy: fundamental matrix too small");

    ExpIntegrator env(ts, [a = data.alpha](double) { return a; }, 64);
    Eigen::MatrixXd Ic = Eigen::MatrixXd::Identity(n, n);

    // Deterministic strided pair sampling.
    size_t stride = std::max<size_t>(1, N / size_t(std::sqrt(double(sample_pairs)) + 1));
    std::vector<size_t> idx;
    for (size_t i = 0; i < N; i += stride) idx.push_back(i);

    std::vector<Eigen::MatrixXd> xinv_cache(N);
    std::vector<bool> have_inv(N, false);
    auto xinv_at = [&](size_t i) -> const Eigen::MatrixXd& {
        if (!have_inv[i]) {
            Eigen::MatrixXd x = unflatten(data.fundamental.values()[i], n);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
            lu.setThreshold(1e-40); // X is exponentially split; only exact rank loss counts
            if (!lu.isInvertible())
                throw DomainError("check_dichotomy: singular X at t=" +
                                  std::to_string(times[i]));
            xinv_cache[i] = lu.inverse();
            have_inv[i] = true;
        }
        return xinv_cache[i];
    };

    DichotomyReport rep;
    rep.worst_margin_forward = std::numeric_limits<double>::infinity();
    rep.worst_margin_backward = std::numeric_limits<double>::infinity();
    for (size_t js : idx) {
        double s = times[js];
        double sig = ts.sigma(s);
        int sig_idx = data.fundamental.node_index(sig);
        if (sig_idx < 0) continue; // flagged window edge
        const Eigen::MatrixXd& xinv = xinv_at(size_t(sig_idx));
        for (size_t it : idx) {
            double t = times[it];
            Eigen::MatrixXd xt = unflatten(data.fundamental.values()[it], n);
            if (t >= sig - 1e-12) {
                double envelope = data.k * env.value(sig, t); // k e_{(-)alpha}(t, sigma(s))
                double m = envelope - (xt * data.P * xinv).norm();
                if (m < rep.worst_margin_forward) {
                    rep.worst_margin_forward = m;
                    rep.witness_t = t;
                    rep.witness_s = s;
                }
            }
            if (t <= sig + 1e-12) {
                double envelope = data.k * env.value(t, sig); // k e_{(-)alpha}(sigma(s), t)
                double m = envelope - (xt * (Ic - data.P) * xinv).norm();
                if (m < rep.worst_margin_backward) {
                    rep.worst_margin_backward = m;
                    rep.witness_bt = t;
                    rep.witness_bs = s;
                }
            }
            ++rep.pairs_checked;
        }
    }
    rep.holds = rep.worst_margin_forward >= -1e-9 && rep.worst_margin_backward >= -1e-9;
    return rep;
}

DichotomyData diagonal_dichotomy(const std::vector<CoefficientExpr>& c, const TimeScale& ts) {
    const int n = int(c.size());
    if (n == 0) throw DomainError("diagonal_dichotomy: empty coefficient vector");
    int samples = std::max(2, int(64 * ts.total_dense_length()));
    double m_tilde = std::numeric_limits<double>::infinity();
    for (const auto& ci : c) {
        BoundEstimate b = bound_estimate(ci, ts, samples);
        if (b.inf_value <= 0.0)
            throw DomainError("diagonal_dichotomy: inf c_i <= 0 (m tilde not positive)");
        m_tilde = std::min(m_tilde, b.inf_value);
    }
    for (double s : ts.scattered_points()) {
        double mu = ts.graininess(s);
        for (const auto& ci : c)
            if (1.0 - mu * ci.eval(s) <= 1e-12)
                throw RegressivityError(
                    "diagonal_dichotomy: -c not positively regressive at t=" +
                    std::to_string(s));
    }

    std::vector<double> times = rk_grid(ts);
    std::vector<std::vector<double>> cums(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& ci = c[size_t(i)];
        cums[size_t(i)] =
            cumulative_cylinder(ts, [&ci](double u) { return -ci.eval(u); }, times);
    }
    std::vector<std::vector<double>> vals(times.size(),
                                          std::vector<double>(size_t(n * n), 0.0));
    for (size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < n; ++i)
            vals[k][size_t(i * n + i)] = std::exp(cums[size_t(i)][k]);

    DichotomyData d;
    d.P = Eigen::MatrixXd::Identity(n, n);
    d.k = std::sqrt(double(n));
    d.alpha = m_tilde;
    d.fundamental = GridFunction(ts, times, vals);
    return d;
}

PreconditionReport lemma41_preconditions(const LinearSystem& sys, int probe) {
    const TimeScale& ts = sys.scale();
    int per_unit = std::max(1, int(probe / std::max(1.0, ts.total_dense_length())));
    PreconditionReport rep;
    for (double t : ts.sample_points(per_unit)) {
        Eigen::MatrixXd a = sys.A_at(t);
        Eigen::FullPivLU<Eigen::MatrixXd> lua(a);
        if (!lua.isInvertible()) ++rep.singular_a;
        else rep.max_inv_a = std::max(rep.max_inv_a, lua.inverse().norm());
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension()) +
                            ts.graininess(t) * a;
        Eigen::FullPivLU<Eigen::MatrixXd> lum(m);
        if (!lum.isInvertible()) ++rep.singular_i_mu_a;
        else rep.max_inv_i_mu_a = std::max(rep.max_inv_i_mu_a, lum.inverse().norm());
    }
    rep.bounded = rep.singular_a == 0 && rep.singular_i_mu_a == 0;
    return rep;
}

BoundedSolution bounded_solution_fn(const std::function<Eigen::MatrixXd(double)>& A,
                                    const std::function<Eigen::VectorXd(double)>& f,
                                    const TimeScale& ts, const DichotomyData& data,
                                    double tol) {
    if (tol <= 0) throw DomainError("bounded_solution: tol must be positive");
    const int n = int(data.P.rows());
    std::vector<double> times = rk_grid(ts);
    const size_t N = times.size();
    if (N < 2) throw DomainError("bounded_solution: window too small");

    const bool p_identity = (data.P - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12;
    const bool p_zero = data.P.norm() < 1e-12;

    double supf = 0.0;
    for (double t : times) supf = std::max(supf, f(t).norm());

    // X proj X^{-1} at arbitrary times, for the projected forcing.
    auto q_at = [&](double u, const Eigen::MatrixXd& proj) {
        Eigen::MatrixXd x = grid_matrix_at(data.fundamental, u, n);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
        lu.setThreshold(1e-40); // tolerate the exponential splitting of X
        if (!lu.isInvertible())
            throw DomainError("bounded_solution: singular X at t=" + std::to_string(u));
        return Eigen::MatrixXd(x * proj * lu.inverse());
    };

    std::vector<Eigen::VectorXd> B(N, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::VectorXd> C(N, Eigen::VectorXd::Zero(n));

    if (!p_zero) {
        auto rhs = [&](double u, const Eigen::VectorXd& b) -> Eigen::VectorXd {
            if (p_identity) return A(u) * b + f(u);
            return A(u) * b + q_at(u, data.P) * f(u);
        };
        for (size_t k = 0; k + 1 < N; ++k) {
            double t = times[k], next = times[k + 1];
            double sig = ts.sigma(t);
            if (sig > t + 1e-9) {
                double mu = sig - t;
                Eigen::VectorXd force = p_identity
                                            ? Eigen::VectorXd(f(t))
                                            : Eigen::VectorXd(q_at(sig, data.P) * f(t));
                B[k + 1] = B[k] + mu * (A(t) * B[k] + force);
            } else {
                B[k + 1] = rk4_vector_step(rhs, t, next - t, B[k]);
            }
        }
    }

    if (!p_identity) {
        Eigen::MatrixXd icomp = Eigen::MatrixXd::Identity(n, n) - data.P;
        auto rhs = [&](double u, const Eigen::VectorXd& cv) -> Eigen::VectorXd {
            return A(u) * cv - q_at(u, icomp) * f(u);
        };
        for (size_t k = N - 1; k > 0; --k) {
            double prev = times[k - 1];
            double sig = ts.sigma(prev);
            if (sig > prev + 1e-9) {
                double mu = sig - prev;
                Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + mu * A(prev);
                Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
                if (!lu.isInvertible())
                    throw RegressivityError("bounded_solution: I + mu A singular at t=" +
                                            std::to_string(prev));
                C[k - 1] = lu.solve(C[k] + mu * (q_at(sig, icomp) * f(prev)));
            } else {
                C[k - 1] = rk4_vector_step(rhs, times[k], prev - times[k], C[k]);
            }
        }
    }

    // Truncation tails: k(1+k) sup|f| / alpha times the dichotomy envelope
    // measured from the cut edges.
    ExpIntegrator env(ts, [a = data.alpha](double) { return a; }, 64);
    double coef = data.k * (1.0 + data.k) * supf / data.alpha;
    auto tail_at = [&](double t) {
        double fwd = p_zero ? 0.0 : coef * env.value(times.front(), t);
        double bwd = p_identity ? 0.0 : coef * env.value(t, times.back());
        return fwd + bwd;
    };
    size_t first = N, last = 0;
    for (size_t k = 0; k < N; ++k) {
        if (tail_at(times[k]) <= tol) {
            if (first == N) first = k;
            last = k;
        }
    }
    if (first == N || last <= first) {
        double horizon = std::log(std::max(coef / tol, 2.0)) / data.alpha;
        throw ConvergenceError(
            "bounded_solution: window too small for tol; envelope needs about " +
            std::to_string(horizon) + " time units of margin");
    }

    std::vector<double> out_t(times.begin() + long(first), times.begin() + long(last) + 1);
    std::vector<std::vector<double>> out_v;
    out_v.reserve(out_t.size());
    for (size_t k = first; k <= last; ++k) {
        std::vector<double> row(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) row[size_t(i)] = B[k](i) - C[k](i);
        out_v.push_back(std::move(row));
    }
    BoundedSolution sol;
    sol.x = GridFunction(ts.clipped(out_t.front() - 1e-9, out_t.back() + 1e-9), out_t, out_v);
    sol.tail_bound = std::max(tail_at(out_t.front()), tail_at(out_t.back()));
    sol.sup_forcing = supf;
    return sol;
}

BoundedSolution bounded_solution(const LinearSystem& sys, const DichotomyData& data,
                                 double tol) {
    if (!sys.regressive())
        throw RegressivityError("bounded_solution: system not regressive on the window");
    return bounded_solution_fn([&](double t) { return sys.A_at(t); },
                               [&](double t) { return sys.f_at(t); }, sys.scale(), data, tol);
}

} // namespace tslab
