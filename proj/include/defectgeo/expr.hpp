#pragma once

// Scalar expression language used for every user-defined field.
//
// Expressions are immutable DAGs over the variables x, y, z, t. Nodes are
// hash-consed: two structurally equal expressions built anywhere in the
// process share one node, so structural equality is pointer equality and
// common subexpressions are evaluated once. Constructors fold constants and
// drop neutral elements (0 + e, 1 * e, e ^ 1, ...).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "defectgeo/point.hpp"

namespace defectgeo {

enum class Var : std::uint8_t { X = 0, Y = 1, Z = 2, T = 3 };

enum class Op : std::uint8_t {
    Const,
    Variable,
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Pow,  // base ^ constant exponent (exponent stored as the node value)
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sign,  // derivative of abs; sign(0) = 0
};

namespace detail {
struct ExprNode;
}

class Expr {
public:
    /// The constant 0.
    Expr();
    /// A constant.
    Expr(double value);  // NOLINT(google-explicit-constructor): numbers read as expressions

    static Expr variable(Var v);
    static Expr x() { return variable(Var::X); }
    static Expr y() { return variable(Var::Y); }
    static Expr z() { return variable(Var::Z); }
    static Expr t() { return variable(Var::T); }

    Op op() const noexcept;
    /// Constant value, or the exponent of a Pow node.
    double value() const noexcept;
    Var var() const noexcept;
    /// First operand (binary ops, Neg, Pow base, functions).
    const Expr& lhs() const noexcept;
    /// Second operand of binary ops.
    const Expr& rhs() const noexcept;

    bool is_constant() const noexcept { return op() == Op::Const; }
    bool is_constant(double v) const noexcept { return is_constant() && value() == v; }
    bool depends_on(Var v) const noexcept;
    /// Bit k set <=> the expression depends on Var(k).
    unsigned dependency_mask() const noexcept;

    /// Node identity; equal ids <=> structurally equal expressions.
    const void* id() const noexcept { return node_.get(); }
    friend bool operator==(const Expr& a, const Expr& b) noexcept { return a.node_ == b.node_; }

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
    friend struct detail::ExprNode;
    friend class ExprFactory;

    std::shared_ptr<const detail::ExprNode> node_;
};

namespace sym {
Expr pow(const Expr& base, double exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sqrt(const Expr& e);
Expr abs(const Expr& e);
Expr sign(const Expr& e);
/// Function node by name; returns false when `name` is not a known function.
bool apply_function(std::string_view name, const Expr& arg, Expr& out);
}  // namespace sym

/// Symbolic partial derivative. abs' is sign with sign(0) = 0.
Expr differentiate(const Expr& e, Var v);
/// Batch form sharing one memo table, so shared subexpressions are
/// differentiated once.
std::vector<Expr> differentiate(std::span<const Expr> es, Var v);

/// Text that parses back to the same expression.
std::string to_string(const Expr& e);

/// Number of distinct nodes reachable from the roots.
std::size_t node_count(std::span<const Expr> roots);

/// Straight-line program evaluating a set of expressions at a point with
/// every shared subexpression computed once.
class Tape {
public:
    Tape() = default;
    explicit Tape(std::span<const Expr> roots);

    std::size_t outputs() const noexcept { return outputs_.size(); }
    std::size_t size() const noexcept { return code_.size(); }

    /// Throws EvaluationError on division by zero, ln/sqrt domain errors and
    /// non-finite powers.
    void evaluate(const Point& p, std::span<double> out) const;
    std::vector<double> evaluate(const Point& p) const;

private:
    struct Instr {
        Op op;
        std::uint8_t var;
        std::uint32_t a;
        std::uint32_t b;
        double value;
    };
    std::vector<Instr> code_;
    std::vector<std::uint32_t> outputs_;
};

/// Convenience single-expression evaluation (compiles a tape per call).
double evaluate(const Expr& e, const Point& p);

/// Parse the expression language: numbers, x y z t, pi, euler, + - * / ^,
/// unary minus, sin cos tan exp ln sqrt abs sign. Precedence
/// ^ > unary minus > * / > + -; ^ is right associative and takes a constant
/// exponent. Throws ParseError with a byte offset.
Expr parse_expr(std::string_view text);

}  // namespace defectgeo
