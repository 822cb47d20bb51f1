#include "defectgeo/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

#include "defectgeo/errors.hpp"

namespace defectgeo {

namespace detail {

struct ExprNode {
    Op op;
    Var var;
    unsigned deps;
    double value;
    Expr a;
    Expr b;
};

}  // namespace detail

using detail::ExprNode;

// Hash-consing node factory. Every node in the process goes through here.
class ExprFactory {
public:
    static Expr make(Op op, Var var, double value, const Expr& a, const Expr& b)
    {
        if (value == 0.0) value = 0.0;  // fold -0.0
        const Key key{op, static_cast<std::uint8_t>(var), std::bit_cast<std::uint64_t>(value), a.id(),
                      b.id()};
        auto& table = instance();
        std::lock_guard lock(table.mutex);
        auto it = table.nodes.find(key);
        if (it != table.nodes.end()) {
            if (auto live = it->second.lock()) return Expr(std::move(live));
        }
        unsigned deps = 0;
        if (op == Op::Variable) {
            deps = 1u << static_cast<unsigned>(var);
        } else if (op != Op::Const) {
            deps = a.dependency_mask() | b.dependency_mask();
        }
        auto node = std::make_shared<const ExprNode>(ExprNode{op, var, deps, value, a, b});
        table.nodes.insert_or_assign(key, node);
        if (table.nodes.size() >= table.sweep_at) table.sweep();
        return Expr(std::move(node));
    }

    static Expr leaf_zero_operand() { return Expr(std::shared_ptr<const ExprNode>{}); }

private:
    struct Key {
        Op op;
        std::uint8_t var;
        std::uint64_t bits;
        const void* a;
        const void* b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::size_t h = std::hash<std::uint64_t>{}(k.bits);
            auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
            mix(static_cast<std::size_t>(k.op) * 31u + k.var);
            mix(std::hash<const void*>{}(k.a));
            mix(std::hash<const void*>{}(k.b));
            return h;
        }
    };
    struct Table {
        std::mutex mutex;
        std::unordered_map<Key, std::weak_ptr<const ExprNode>, KeyHash> nodes;
        std::size_t sweep_at = 1u << 14;

        void sweep()
        {
            std::erase_if(nodes, [](const auto& kv) { return kv.second.expired(); });
            sweep_at = std::max<std::size_t>(1u << 14, 2 * nodes.size());
        }
    };
    static Table& instance()
    {
        static Table table;
        return table;
    }
};

namespace {

const Expr& null_operand()
{
    static const Expr e = ExprFactory::leaf_zero_operand();
    return e;
}

Expr node(Op op, const Expr& a, const Expr& b = null_operand(), double value = 0.0)
{
    return ExprFactory::make(op, Var::X, value, a, b);
}

Expr constant(double v) { return ExprFactory::make(Op::Const, Var::X, v, null_operand(), null_operand()); }

bool is_negative_constant(const Expr& e) { return e.is_constant() && e.value() < 0.0; }

double apply_unary(Op op, double v)
{
    switch (op) {
    case Op::Neg: return -v;
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Tan: return std::tan(v);
    case Op::Exp: return std::exp(v);
    case Op::Ln: return v > 0.0 ? std::log(v) : std::numeric_limits<double>::quiet_NaN();
    case Op::Sqrt: return v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    case Op::Abs: return std::abs(v);
    case Op::Sign: return static_cast<double>((v > 0.0) - (v < 0.0));
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

Expr function(Op op, const Expr& a)
{
    if (a.is_constant()) {
        const double v = apply_unary(op, a.value());
        if (std::isfinite(v)) return constant(v);
    }
    return node(op, a);
}

}  // namespace

// --- Expr basics -----------------------------------------------------------

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) : node_(constant(value).node_) {}

Expr Expr::variable(Var v) { return ExprFactory::make(Op::Variable, v, 0.0, null_operand(), null_operand()); }

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
Var Expr::var() const noexcept { return node_->var; }
const Expr& Expr::lhs() const noexcept { return node_->a; }
const Expr& Expr::rhs() const noexcept { return node_->b; }
bool Expr::depends_on(Var v) const noexcept { return (dependency_mask() >> static_cast<unsigned>(v)) & 1u; }
unsigned Expr::dependency_mask() const noexcept { return node_ ? node_->deps : 0u; }

// --- simplifying constructors ----------------------------------------------

Expr operator-(const Expr& a)
{
    switch (a.op()) {
    case Op::Const: return constant(-a.value());
    case Op::Neg: return a.lhs();
    case Op::Sub: return a.rhs() - a.lhs();
    case Op::Mul:
        if (a.lhs().is_constant()) return constant(-a.lhs().value()) * a.rhs();
        break;
    default: break;
    }
    return node(Op::Neg, a);
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant()) return constant(a.value() + b.value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (b.op() == Op::Neg) return a - b.lhs();
    if (a.op() == Op::Neg) return b - a.lhs();
    if (is_negative_constant(b)) return a - constant(-b.value());
    if (is_negative_constant(a)) return b - constant(-a.value());
    if (a == b) return constant(2.0) * a;
    return node(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant()) return constant(a.value() - b.value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    if (a == b) return constant(0.0);
    if (b.op() == Op::Neg) return a + b.lhs();
    if (is_negative_constant(b)) return a + constant(-b.value());
    return node(Op::Sub, a, b);
}

Expr operator*(const Expr& a_in, const Expr& b_in)
{
    if (a_in.is_constant() && b_in.is_constant()) return constant(a_in.value() * b_in.value());
    const bool swap = b_in.is_constant();
    const Expr& a = swap ? b_in : a_in;
    const Expr& b = swap ? a_in : b_in;
    if (a.is_constant()) {
        const double c = a.value();
        if (c == 0.0) return constant(0.0);
        if (c == 1.0) return b;
        if (c == -1.0) return -b;
        if (b.op() == Op::Mul && b.lhs().is_constant()) return constant(c * b.lhs().value()) * b.rhs();
        if (b.op() == Op::Neg) return constant(-c) * b.lhs();
        return node(Op::Mul, a, b);
    }
    if (a.op() == Op::Neg) return -(a.lhs() * b);
    if (b.op() == Op::Neg) return -(a * b.lhs());
    return node(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) return constant(a.value() / b.value());
    if (b.is_constant(1.0)) return a;
    if (b.is_constant(-1.0)) return -a;
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return constant(0.0);
    if (a.op() == Op::Neg) return -(a.lhs() / b);
    if (b.op() == Op::Neg) return -(a / b.lhs());
    return node(Op::Div, a, b);
}

namespace sym {

Expr pow(const Expr& base, double exponent)
{
    if (exponent == 0.0) return constant(1.0);
    if (exponent == 1.0) return base;
    if (base.is_constant()) {
        const double v = std::pow(base.value(), exponent);
        if (std::isfinite(v)) return constant(v);
    }
    return ExprFactory::make(Op::Pow, Var::X, exponent, base, null_operand());
}

Expr sin(const Expr& e) { return function(Op::Sin, e); }
Expr cos(const Expr& e) { return function(Op::Cos, e); }
Expr tan(const Expr& e) { return function(Op::Tan, e); }
Expr exp(const Expr& e) { return function(Op::Exp, e); }
Expr ln(const Expr& e) { return function(Op::Ln, e); }
Expr sqrt(const Expr& e) { return function(Op::Sqrt, e); }
Expr abs(const Expr& e) { return function(Op::Abs, e); }
Expr sign(const Expr& e) { return function(Op::Sign, e); }

bool apply_function(std::string_view name, const Expr& arg, Expr& out)
{
    static const std::unordered_map<std::string_view, Op> table{
        {"sin", Op::Sin},   {"cos", Op::Cos},   {"tan", Op::Tan}, {"exp", Op::Exp},
        {"ln", Op::Ln},     {"sqrt", Op::Sqrt}, {"abs", Op::Abs}, {"sign", Op::Sign},
    };
    auto it = table.find(name);
    if (it == table.end()) return false;
    out = function(it->second, arg);
    return true;
}

}  // namespace sym

// --- differentiation -------------------------------------------------------

namespace {

class Differentiator {
public:
    explicit Differentiator(Var v) : v_(v) {}

    Expr operator()(const Expr& e)
    {
        if (!e.depends_on(v_)) return constant(0.0);
        if (e.op() == Op::Variable) return constant(1.0);
        auto it = memo_.find(e.id());
        if (it != memo_.end()) return it->second;
        Expr d = rule(e);
        memo_.emplace(e.id(), d);
        return d;
    }

private:
    Expr rule(const Expr& e)
    {
        const Expr& a = e.lhs();
        switch (e.op()) {
        case Op::Add: return (*this)(a) + (*this)(e.rhs());
        case Op::Sub: return (*this)(a) - (*this)(e.rhs());
        case Op::Mul: {
            const Expr& b = e.rhs();
            return (*this)(a) * b + a * (*this)(b);
        }
        case Op::Div: {
            const Expr& b = e.rhs();
            const Expr da = (*this)(a);
            const Expr db = (*this)(b);
            if (db.is_constant(0.0)) return da / b;
            return (da * b - a * db) / (b * b);
        }
        case Op::Neg: return -(*this)(a);
        case Op::Pow: {
            const double k = e.value();
            return constant(k) * sym::pow(a, k - 1.0) * (*this)(a);
        }
        case Op::Sin: return sym::cos(a) * (*this)(a);
        case Op::Cos: return -(sym::sin(a) * (*this)(a));
        case Op::Tan: {
            const Expr c = sym::cos(a);
            return (*this)(a) / (c * c);
        }
        case Op::Exp: return e * (*this)(a);
        case Op::Ln: return (*this)(a) / a;
        case Op::Sqrt: return (*this)(a) / (constant(2.0) * e);
        case Op::Abs: return sym::sign(a) * (*this)(a);
        case Op::Sign:
        case Op::Const:
        case Op::Variable: return constant(0.0);
        }
        return constant(0.0);
    }

    Var v_;
    std::unordered_map<const void*, Expr> memo_;
};

}  // namespace

Expr differentiate(const Expr& e, Var v) { return Differentiator(v)(e); }

std::vector<Expr> differentiate(std::span<const Expr> es, Var v)
{
    Differentiator d(v);
    std::vector<Expr> out;
    out.reserve(es.size());
    for (const Expr& e : es) out.push_back(d(e));
    return out;
}

// --- printing ---------------------------------------------------------------

namespace {

constexpr int kPrecSum = 1;
constexpr int kPrecProduct = 2;
constexpr int kPrecUnary = 3;
constexpr int kPrecPower = 4;
constexpr int kPrecAtom = 5;

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int precedence(const Expr& e)
{
    switch (e.op()) {
    case Op::Const: return e.value() < 0.0 ? kPrecUnary : kPrecAtom;
    case Op::Add:
    case Op::Sub: return kPrecSum;
    case Op::Mul:
    case Op::Div: return kPrecProduct;
    case Op::Neg: return kPrecUnary;
    case Op::Pow: return kPrecPower;
    default: return kPrecAtom;
    }
}

const char* function_name(Op op)
{
    switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Tan: return "tan";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Sign: return "sign";
    default: return "?";
    }
}

void print(const Expr& e, int min_prec, std::string& out)
{
    const bool paren = precedence(e) < min_prec;
    if (paren) out += '(';
    switch (e.op()) {
    case Op::Const: out += format_number(e.value()); break;
    case Op::Variable: out += "xyzt"[static_cast<int>(e.var())]; break;
    case Op::Add:
    case Op::Sub:
        print(e.lhs(), kPrecSum, out);
        out += e.op() == Op::Add ? " + " : " - ";
        print(e.rhs(), kPrecProduct, out);
        break;
    case Op::Mul:
    case Op::Div:
        print(e.lhs(), kPrecProduct, out);
        out += e.op() == Op::Mul ? "*" : "/";
        print(e.rhs(), kPrecUnary, out);
        break;
    case Op::Neg:
        out += '-';
        print(e.lhs(), kPrecUnary, out);
        break;
    case Op::Pow:
        print(e.lhs(), kPrecAtom, out);
        out += '^';
        out += format_number(e.value());
        break;
    default:
        out += function_name(e.op());
        out += '(';
        print(e.lhs(), 0, out);
        out += ')';
        break;
    }
    if (paren) out += ')';
}

}  // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, 0, out);
    return out;
}

// --- tape -------------------------------------------------------------------

namespace {

bool has_operands(Op op) { return op != Op::Const && op != Op::Variable; }
bool is_binary(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div; }

template <class Visit>
void post_order(std::span<const Expr> roots, Visit&& visit)
{
    std::unordered_set<const void*> seen;
    std::vector<std::pair<const Expr*, bool>> stack;
    for (const Expr& r : roots) {
        stack.emplace_back(&r, false);
        while (!stack.empty()) {
            auto [e, expanded] = stack.back();
            stack.pop_back();
            if (expanded) {
                visit(*e);
                continue;
            }
            if (seen.count(e->id())) continue;
            seen.insert(e->id());
            stack.emplace_back(e, true);
            if (has_operands(e->op())) {
                if (is_binary(e->op())) stack.emplace_back(&e->rhs(), false);
                stack.emplace_back(&e->lhs(), false);
            }
        }
    }
}

}  // namespace

std::size_t node_count(std::span<const Expr> roots)
{
    std::size_t n = 0;
    post_order(roots, [&n](const Expr&) { ++n; });
    return n;
}

Tape::Tape(std::span<const Expr> roots)
{
    std::unordered_map<const void*, std::uint32_t> slot;
    post_order(roots, [&](const Expr& e) {
        Instr in{e.op(), static_cast<std::uint8_t>(e.var()), 0, 0, e.value()};
        if (has_operands(e.op())) {
            in.a = slot.at(e.lhs().id());
            if (is_binary(e.op())) in.b = slot.at(e.rhs().id());
        }
        slot.emplace(e.id(), static_cast<std::uint32_t>(code_.size()));
        code_.push_back(in);
    });
    outputs_.reserve(roots.size());
    for (const Expr& r : roots) outputs_.push_back(slot.at(r.id()));
}

void Tape::evaluate(const Point& p, std::span<double> out) const
{
    thread_local std::vector<double> r;
    r.resize(code_.size());
    const double vars[4] = {p.x, p.y, p.z, p.t};
    auto fail = [&p](const char* what) { throw EvaluationError(what, p.x, p.y, p.z, p.t); };
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        double v = 0.0;
        switch (in.op) {
        case Op::Const: v = in.value; break;
        case Op::Variable: v = vars[in.var]; break;
        case Op::Add: v = r[in.a] + r[in.b]; break;
        case Op::Sub: v = r[in.a] - r[in.b]; break;
        case Op::Mul: v = r[in.a] * r[in.b]; break;
        case Op::Div:
            if (r[in.b] == 0.0) fail("division by zero");
            v = r[in.a] / r[in.b];
            break;
        case Op::Neg: v = -r[in.a]; break;
        case Op::Pow:
            if (in.value == 2.0) {
                v = r[in.a] * r[in.a];
            } else {
                v = std::pow(r[in.a], in.value);
                if (!std::isfinite(v)) {
                    if (r[in.a] == 0.0) fail("division by zero in power");
                    fail("invalid power");
                }
            }
            break;
        case Op::Sin: v = std::sin(r[in.a]); break;
        case Op::Cos: v = std::cos(r[in.a]); break;
        case Op::Tan: v = std::tan(r[in.a]); break;
        case Op::Exp: v = std::exp(r[in.a]); break;
        case Op::Ln:
            if (!(r[in.a] > 0.0)) fail("logarithm of a non-positive value");
            v = std::log(r[in.a]);
            break;
        case Op::Sqrt:
            if (r[in.a] < 0.0) fail("square root of a negative value");
            v = std::sqrt(r[in.a]);
            break;
        case Op::Abs: v = std::abs(r[in.a]); break;
        case Op::Sign: v = static_cast<double>((r[in.a] > 0.0) - (r[in.a] < 0.0)); break;
        }
        r[i] = v;
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = r[outputs_[k]];
}

std::vector<double> Tape::evaluate(const Point& p) const
{
    std::vector<double> out(outputs_.size());
    evaluate(p, out);
    return out;
}

double evaluate(const Expr& e, const Point& p)
{
    const Tape tape(std::span<const Expr>(&e, 1));
    double out = 0.0;
    tape.evaluate(p, std::span<double>(&out, 1));
    return out;
}

// --- parser -----------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    Expr parse()
    {
        Expr e = sum();
        skip_ws();
        if (pos_ != s_.size()) fail("operator or end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const char* expected) const { throw ParseError(pos_, expected, std::string(s_)); }

    void skip_ws()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r')) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum()
    {
        Expr e = product();
        for (;;) {
            if (accept('+')) {
                e = e + product();
            } else if (accept('-')) {
                e = e - product();
            } else {
                return e;
            }
        }
    }

    Expr product()
    {
        Expr e = unary();
        for (;;) {
            if (accept('*')) {
                e = e * unary();
            } else if (accept('/')) {
                e = e / unary();
            } else {
                return e;
            }
        }
    }

    Expr unary()
    {
        if (accept('-')) return -unary();
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t at = pos_;
        Expr exponent = unary();
        if (!exponent.is_constant()) {
            pos_ = at;
            fail("constant exponent");
        }
        return sym::pow(base, exponent.value());
    }

    Expr primary()
    {
        skip_ws();
        if (pos_ >= s_.size()) fail("number, variable, function or '('");
        const char c = s_[pos_];
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            if (!accept(')')) fail("')'");
            return e;
        }
        fail("number, variable, function or '('");
    }

    Expr number()
    {
        const std::size_t start = pos_;
        auto digits = [this] {
            std::size_t n = 0;
            while (pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9') {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) {
            pos_ = start;
            fail("digits");
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = mark + 1;
                fail("exponent digits");
            }
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
            pos_ = start;
            fail("number");
        }
        return Expr(v);
    }

    Expr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size()) {
            const char c = s_[pos_];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_') {
                ++pos_;
            } else {
                break;
            }
        }
        const std::string_view name = s_.substr(start, pos_ - start);
        if (name == "x") return Expr::x();
        if (name == "y") return Expr::y();
        if (name == "z") return Expr::z();
        if (name == "t") return Expr::t();
        if (name == "pi") return Expr(std::numbers::pi);
        if (name == "euler") return Expr(std::numbers::e);
        Expr probe;
        if (!sym::apply_function(name, probe, probe)) {
            pos_ = start;
            fail("variable (x, y, z, t), constant (pi, euler) or function");
        }
        if (!accept('(')) fail("'(' after function name");
        Expr arg = sum();
        if (!accept(')')) fail("')'");
        Expr out;
        sym::apply_function(name, arg, out);
        return out;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace defectgeo
