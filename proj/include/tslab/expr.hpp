#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tslab/errors.hpp"
#include "tslab/timescale.hpp"

namespace tslab {

/// Parsed scalar expression of time; used for all model coefficients.
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := number | 't' | func '(' expr ')' | '(' expr ')' | '-' factor
///   func   := sin | cos | abs | exp | min | max   (min/max binary via comma)
/// Numbers are decimal with optional exponent; angles are radians.
/// Immutable after parse; eval is pure.
class CoefficientExpr {
public:
    CoefficientExpr() = default;

    static CoefficientExpr parse(const std::string& text);
    static CoefficientExpr constant(double c);

    double eval(double t) const;
    /// Canonical serialization; parse(print()) reproduces the same tree.
    std::string print() const;

    bool valid() const { return root_ != nullptr; }

    struct Node;

private:
    explicit CoefficientExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

enum class BoundMethod { Sampled, UserDeclared };

struct BoundEstimate {
    double inf_value = 0.0;
    double sup_value = 0.0;
    BoundMethod method = BoundMethod::Sampled;
};

/// Min/max of the expression over a dense sample of the window: every
/// scattered point plus a uniform fill of the continuous components totaling
/// about `samples` points. samples >= 2.
BoundEstimate bound_estimate(const CoefficientExpr& expr, const TimeScale& ts, int samples);

inline BoundEstimate declared_bounds(double inf, double sup) {
    if (inf > sup) throw ConfigError("declared bound with inf > sup");
    return BoundEstimate{inf, sup, BoundMethod::UserDeclared};
}

} // namespace tslab
