#include "tslab/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace tslab {

struct CoefficientExpr::Node {
    enum class Kind { Number, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Abs, Exp, Min, Max };
    Kind kind;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = CoefficientExpr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Number;
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "' " + what, pos_);
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make(Node::Kind::Add, lhs, term());
            else if (eat('-')) lhs = make(Node::Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) lhs = make(Node::Kind::Mul, lhs, factor());
            else if (eat('/')) lhs = make(Node::Kind::Div, lhs, factor());
            else return lhs;
        }
    }

    NodePtr factor() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '-') { ++pos_; return make(Node::Kind::Neg, factor()); }
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')', "to close group");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected character", pos_);
    }

    NodePtr number() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t mark = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // bare 'e' is not part of the number
            }
        }
        if (pos_ == start || (pos_ == start + 1 && s_[start] == '.'))
            throw ParseError("malformed number", start);
        double v = std::strtod(s_.substr(start, pos_ - start).c_str(), nullptr);
        return make_num(v);
    }

    NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "t") return make(Node::Kind::Var);
        Node::Kind k;
        bool binary = false;
        if (name == "sin") k = Node::Kind::Sin;
        else if (name == "cos") k = Node::Kind::Cos;
        else if (name == "abs") k = Node::Kind::Abs;
        else if (name == "exp") k = Node::Kind::Exp;
        else if (name == "min") { k = Node::Kind::Min; binary = true; }
        else if (name == "max") { k = Node::Kind::Max; binary = true; }
        else throw ParseError("unknown identifier '" + name + "'", start);
        expect('(', "after function name");
        NodePtr a = expr();
        NodePtr b;
        if (binary) {
            expect(',', "between min/max arguments");
            b = expr();
        }
        expect(')', "to close call");
        return make(k, a, b);
    }

    const std::string& s_;
    size_t pos_ = 0;
};

double eval_node(const Node& n, double t) {
    using K = Node::Kind;
    switch (n.kind) {
        case K::Number: return n.value;
        case K::Var: return t;
        case K::Add: return eval_node(*n.a, t) + eval_node(*n.b, t);
        case K::Sub: return eval_node(*n.a, t) - eval_node(*n.b, t);
        case K::Mul: return eval_node(*n.a, t) * eval_node(*n.b, t);
        case K::Div: {
            double d = eval_node(*n.b, t);
            if (d == 0.0) throw EvalError("division by zero at t=" + std::to_string(t));
            return eval_node(*n.a, t) / d;
        }
        case K::Neg: return -eval_node(*n.a, t);
        case K::Sin: return std::sin(eval_node(*n.a, t));
        case K::Cos: return std::cos(eval_node(*n.a, t));
        case K::Abs: return std::fabs(eval_node(*n.a, t));
        case K::Exp: return std::exp(eval_node(*n.a, t));
        case K::Min: return std::min(eval_node(*n.a, t), eval_node(*n.b, t));
        case K::Max: return std::max(eval_node(*n.a, t), eval_node(*n.b, t));
    }
    throw EvalError("corrupt expression node");
}

std::string num_str(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void print_node(const Node& n, std::string& out) {
    using K = Node::Kind;
    auto bin = [&](const char* op) {
        out += '(';
        print_node(*n.a, out);
        out += op;
        print_node(*n.b, out);
        out += ')';
    };
    auto call = [&](const char* f) {
        out += f;
        out += '(';
        print_node(*n.a, out);
        if (n.b) { out += ','; print_node(*n.b, out); }
        out += ')';
    };
    switch (n.kind) {
        case K::Number:
            if (n.value < 0) { out += '('; out += num_str(n.value); out += ')'; }
            else out += num_str(n.value);
            break;
        case K::Var: out += 't'; break;
        case K::Add: bin("+"); break;
        case K::Sub: bin("-"); break;
        case K::Mul: bin("*"); break;
        case K::Div: bin("/"); break;
        case K::Neg: out += "(-"; print_node(*n.a, out); out += ')'; break;
        case K::Sin: call("sin"); break;
        case K::Cos: call("cos"); break;
        case K::Abs: call("abs"); break;
        case K::Exp: call("exp"); break;
        case K::Min: call("min"); break;
        case K::Max: call("max"); break;
    }
}

} // namespace

CoefficientExpr CoefficientExpr::parse(const std::string& text) {
    return CoefficientExpr(Parser(text).run());
}

CoefficientExpr CoefficientExpr::constant(double c) {
    return CoefficientExpr(make_num(c));
}

double CoefficientExpr::eval(double t) const {
    if (!root_) throw EvalError("evaluating an empty expression");
    double v = eval_node(*root_, t);
    if (!std::isfinite(v))
        throw EvalError("non-finite result at t=" + std::to_string(t));
    return v;
}

std::string CoefficientExpr::print() const {
    if (!root_) return "";
    std::string out;
    print_node(*root_, out);
    return out;
}

BoundEstimate bound_estimate(const CoefficientExpr& expr, const TimeScale& ts, int samples) {
    if (samples < 2) throw DomainError("bound_estimate: samples must be >= 2");
    double dense_len = 0.0;
    for (const auto& iv : ts.intervals()) dense_len += iv.hi - iv.lo;
    int per_unit = dense_len > 0 ? std::max(1, int(samples / std::max(dense_len, 1.0))) : 1;
    std::vector<double> pts = ts.sample_points(per_unit);
    BoundEstimate b;
    b.method = BoundMethod::Sampled;
    b.inf_value = std::numeric_limits<double>::infinity();
    b.sup_value = -std::numeric_limits<double>::infinity();
    for (double t : pts) {
        double v = expr.eval(t);
        b.inf_value = std::min(b.inf_value, v);
        b.sup_value = std::max(b.sup_value, v);
    }
    return b;
}

} // namespace tslab
