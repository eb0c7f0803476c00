#include "osserman/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "osserman/errors.hpp"

namespace osserman::expr {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var(int index, std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->var_index = index;
    n->var_name = std::move(name);
    return n;
}

NodePtr make_unary(NodeKind k, NodePtr a) {
    // Fold -c into a negative constant so that printed trees re-parse to the
    // identical structure.
    if (k == NodeKind::Neg && a->kind == NodeKind::Constant)
        return make_const(-a->value);
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(NodeKind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->kind == NodeKind::Constant && n->value == v;
}

// Simplifying constructors used by the symbolic derivative; they keep the
// output trees readable without doing any general CAS work.
NodePtr sadd(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return make_const(a->value + b->value);
    return make_binary(NodeKind::Add, std::move(a), std::move(b));
}

NodePtr ssub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return make_const(a->value - b->value);
    if (is_const(a, 0.0)) return make_unary(NodeKind::Neg, std::move(b));
    return make_binary(NodeKind::Sub, std::move(a), std::move(b));
}

NodePtr smul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == NodeKind::Constant && b->kind == NodeKind::Constant)
        return make_const(a->value * b->value);
    return make_binary(NodeKind::Mul, std::move(a), std::move(b));
}

NodePtr sdiv(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    return make_binary(NodeKind::Div, std::move(a), std::move(b));
}

NodePtr spow(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(b, 0.0)) return make_const(1.0);
    return make_binary(NodeKind::Pow, std::move(a), std::move(b));
}

// --- parser ---

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars,
           const std::map<std::string, double>& params)
        : src_(src), vars_(vars), params_(params) {}

    NodePtr run() {
        skip_ws();
        if (at_end()) throw EmptyInput();
        NodePtr e = expression();
        skip_ws();
        if (!at_end())
            throw SyntaxError(pos_, "operator or end of input",
                              err_prefix() + "expected operator or end of input");
        return e;
    }

private:
    static constexpr const char* kAtomExpected = "number, identifier, '(', unary '-'";

    std::string err_prefix() const {
        return "syntax error at offset " + std::to_string(pos_) + ": ";
    }

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expression() {
        NodePtr e = term();
        for (;;) {
            skip_ws();
            if (consume('+'))
                e = make_binary(NodeKind::Add, e, term());
            else if (consume('-'))
                e = make_binary(NodeKind::Sub, e, term());
            else
                return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            skip_ws();
            if (consume('*'))
                e = make_binary(NodeKind::Mul, e, unary());
            else if (consume('/'))
                e = make_binary(NodeKind::Div, e, unary());
            else
                return e;
        }
    }

    NodePtr unary() {
        skip_ws();
        if (consume('-')) return make_unary(NodeKind::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        skip_ws();
        if (consume('^')) return make_binary(NodeKind::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (at_end())
            throw SyntaxError(pos_, kAtomExpected, err_prefix() + "expected " + kAtomExpected);
        char c = peek();
        if (consume('(')) {
            NodePtr e = expression();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw SyntaxError(pos_, kAtomExpected, err_prefix() + "expected " + kAtomExpected);
    }

    void expect(char c) {
        skip_ws();
        if (!consume(c))
            throw SyntaxError(pos_, std::string(1, c),
                              err_prefix() + "expected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' belongs to a following identifier, not this number
            }
        }
        double v = 0.0;
        auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
            throw SyntaxError(start, "number", err_prefix() + "malformed number");
        return make_const(v);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        if (peek() == '(') return call(name, start);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return make_var(static_cast<int>(i), name);
        if (auto it = params_.find(name); it != params_.end()) return make_const(it->second);
        throw UnknownIdentifier(name, start);
    }

    NodePtr call(const std::string& name, std::size_t name_offset) {
        expect('(');
        std::vector<NodePtr> args;
        args.push_back(expression());
        while (consume(',')) args.push_back(expression());
        expect(')');

        auto need = [&](std::size_t n, NodeKind k) {
            if (args.size() != n)
                throw SyntaxError(name_offset, "argument list",
                                  "function '" + name + "' takes " + std::to_string(n) +
                                      " argument(s), got " + std::to_string(args.size()));
            if (n == 1) return make_unary(k, args[0]);
            return make_binary(k, args[0], args[1]);
        };
        if (name == "exp") return need(1, NodeKind::Exp);
        if (name == "log") return need(1, NodeKind::Log);
        if (name == "abs") return need(1, NodeKind::Abs);
        if (name == "min") return need(2, NodeKind::Min);
        if (name == "max") return need(2, NodeKind::Max);
        throw UnknownIdentifier(name, name_offset);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    const std::vector<std::string>& vars_;
    const std::map<std::string, double>& params_;
};

// --- evaluation ---

double eval_node(const Node* n, std::span<const double> b) {
    switch (n->kind) {
        case NodeKind::Constant:
            return n->value;
        case NodeKind::Variable:
            return b[static_cast<std::size_t>(n->var_index)];
        case NodeKind::Neg:
            return -eval_node(n->a.get(), b);
        case NodeKind::Add:
            return eval_node(n->a.get(), b) + eval_node(n->b.get(), b);
        case NodeKind::Sub:
            return eval_node(n->a.get(), b) - eval_node(n->b.get(), b);
        case NodeKind::Mul: {
            double r = eval_node(n->a.get(), b) * eval_node(n->b.get(), b);
            if (!std::isfinite(r)) throw DomainError("non-finite product");
            return r;
        }
        case NodeKind::Div: {
            double den = eval_node(n->b.get(), b);
            if (den == 0.0) throw DomainError("division by zero");
            double r = eval_node(n->a.get(), b) / den;
            if (!std::isfinite(r)) throw DomainError("non-finite quotient");
            return r;
        }
        case NodeKind::Pow: {
            double base = eval_node(n->a.get(), b);
            double ex = eval_node(n->b.get(), b);
            if (base < 0.0 && std::rint(ex) != ex)
                throw DomainError("negative base with non-integer exponent");
            if (base == 0.0 && ex < 0.0) throw DomainError("zero base with negative exponent");
            double r = std::pow(base, ex);
            if (!std::isfinite(r)) throw DomainError("non-finite power");
            return r;
        }
        case NodeKind::Exp: {
            double r = std::exp(eval_node(n->a.get(), b));
            if (!std::isfinite(r)) throw DomainError("non-finite exp");
            return r;
        }
        case NodeKind::Log: {
            double a = eval_node(n->a.get(), b);
            if (a <= 0.0) throw DomainError("log of non-positive value");
            return std::log(a);
        }
        case NodeKind::Min:
            return std::min(eval_node(n->a.get(), b), eval_node(n->b.get(), b));
        case NodeKind::Max:
            return std::max(eval_node(n->a.get(), b), eval_node(n->b.get(), b));
        case NodeKind::Abs:
            return std::abs(eval_node(n->a.get(), b));
    }
    throw Error("corrupt expression node");
}

// --- derivative ---

bool node_depends_on(const Node* n, int var) {
    if (!n) return false;
    if (n->kind == NodeKind::Variable) return n->var_index == var;
    return node_depends_on(n->a.get(), var) || node_depends_on(n->b.get(), var);
}

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->kind) {
        case NodeKind::Constant:
            return make_const(0.0);
        case NodeKind::Variable:
            return make_const(n->var_index == var ? 1.0 : 0.0);
        case NodeKind::Neg:
            return make_unary(NodeKind::Neg, diff_node(n->a, var));
        case NodeKind::Add:
            return sadd(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Sub:
            return ssub(diff_node(n->a, var), diff_node(n->b, var));
        case NodeKind::Mul:
            return sadd(smul(diff_node(n->a, var), n->b), smul(n->a, diff_node(n->b, var)));
        case NodeKind::Div:
            return sdiv(ssub(smul(diff_node(n->a, var), n->b), smul(n->a, diff_node(n->b, var))),
                        spow(n->b, make_const(2.0)));
        case NodeKind::Pow: {
            if (!node_depends_on(n->b.get(), var)) {
                if (n->b->kind == NodeKind::Constant) {
                    double c = n->b->value;
                    if (c == 0.0) return make_const(0.0);
                    return smul(smul(make_const(c), spow(n->a, make_const(c - 1.0))),
                                diff_node(n->a, var));
                }
                // f^g with g independent of var: g*f^(g-1)*f'
                return smul(smul(n->b, spow(n->a, ssub(n->b, make_const(1.0)))),
                            diff_node(n->a, var));
            }
            // general case: f^g * (g' log f + g f'/f)
            return smul(spow(n->a, n->b),
                        sadd(smul(diff_node(n->b, var), make_unary(NodeKind::Log, n->a)),
                             smul(n->b, sdiv(diff_node(n->a, var), n->a))));
        }
        case NodeKind::Exp:
            return smul(make_unary(NodeKind::Exp, n->a), diff_node(n->a, var));
        case NodeKind::Log:
            return sdiv(diff_node(n->a, var), n->a);
        case NodeKind::Min:
        case NodeKind::Max:
        case NodeKind::Abs:
            if (node_depends_on(n.get(), var))
                throw NonDifferentiableNode("min/max/abs on the differentiation path");
            return make_const(0.0);
    }
    throw Error("corrupt expression node");
}

// --- printing ---

// Precedence levels: Add/Sub 1, Mul/Div 2, Neg 3, Pow 4, atoms 5.
int precedence(const Node* n) {
    switch (n->kind) {
        case NodeKind::Add:
        case NodeKind::Sub:
            return 1;
        case NodeKind::Mul:
        case NodeKind::Div:
            return 2;
        case NodeKind::Neg:
            return 3;
        case NodeKind::Pow:
            return 4;
        default:
            return 5;
    }
}

void print_node(const Node* n, std::string& out);

void print_child(const Node* c, std::string& out, bool parens) {
    if (parens) out += '(';
    print_node(c, out);
    if (parens) out += ')';
}

void print_node(const Node* n, std::string& out) {
    switch (n->kind) {
        case NodeKind::Constant:
            out += format_double(n->value);
            return;
        case NodeKind::Variable:
            out += n->var_name;
            return;
        case NodeKind::Neg:
            out += '-';
            // '-' re-binds a following product; only Pow, Neg and atoms stay bare
            print_child(n->a.get(), out, precedence(n->a.get()) < 3);
            return;
        case NodeKind::Add:
            print_node(n->a.get(), out);
            out += " + ";
            // '+'/'-' are left-associative: a right Add/Sub child must keep parens
            print_child(n->b.get(), out, precedence(n->b.get()) <= 1);
            return;
        case NodeKind::Sub:
            print_node(n->a.get(), out);
            out += " - ";
            print_child(n->b.get(), out, precedence(n->b.get()) <= 1);
            return;
        case NodeKind::Mul:
            print_child(n->a.get(), out, precedence(n->a.get()) < 2);
            out += '*';
            print_child(n->b.get(), out, precedence(n->b.get()) <= 2);
            return;
        case NodeKind::Div:
            print_child(n->a.get(), out, precedence(n->a.get()) < 2);
            out += '/';
            print_child(n->b.get(), out, precedence(n->b.get()) <= 2);
            return;
        case NodeKind::Pow:
            print_child(n->a.get(), out, precedence(n->a.get()) < 5);
            out += '^';
            // the grammar's exponent slot is a unary, so Neg needs no parens
            print_child(n->b.get(), out, precedence(n->b.get()) < 3);
            return;
        case NodeKind::Exp:
        case NodeKind::Log:
        case NodeKind::Abs: {
            out += n->kind == NodeKind::Exp ? "exp" : n->kind == NodeKind::Log ? "log" : "abs";
            out += '(';
            print_node(n->a.get(), out);
            out += ')';
            return;
        }
        case NodeKind::Min:
        case NodeKind::Max: {
            out += n->kind == NodeKind::Min ? "min" : "max";
            out += '(';
            print_node(n->a.get(), out);
            out += ", ";
            print_node(n->b.get(), out);
            out += ')';
            return;
        }
    }
}

bool same_node(const Node* x, const Node* y) {
    if (x == y) return true;
    if (!x || !y || x->kind != y->kind) return false;
    switch (x->kind) {
        case NodeKind::Constant:
            return x->value == y->value ||
                   (std::isnan(x->value) && std::isnan(y->value));
        case NodeKind::Variable:
            return x->var_index == y->var_index && x->var_name == y->var_name;
        default:
            return same_node(x->a.get(), y->a.get()) && same_node(x->b.get(), y->b.get());
    }
}

}  // namespace

Expr Expr::parse(std::string_view source, const std::vector<std::string>& variables,
                 const std::map<std::string, double>& params) {
    for (const auto& v : variables)
        if (params.count(v))
            throw Error("'" + v + "' declared both as variable and parameter");
    Parser p(source, variables, params);
    return Expr(p.run(), std::make_shared<const std::vector<std::string>>(variables));
}

double Expr::operator()(std::span<const double> bindings) const {
    if (bindings.size() < vars_->size())
        throw MissingBinding("(expected " + std::to_string(vars_->size()) + " bindings)");
    double r = eval_node(root_.get(), bindings);
    if (!std::isfinite(r)) throw DomainError("non-finite result");
    return r;
}

double Expr::eval(const std::map<std::string, double>& bindings) const {
    std::vector<double> b(vars_->size());
    for (std::size_t i = 0; i < vars_->size(); ++i) {
        auto it = bindings.find((*vars_)[i]);
        if (it == bindings.end()) throw MissingBinding((*vars_)[i]);
        b[i] = it->second;
    }
    return (*this)(b);
}

Expr Expr::derivative(const std::string& var) const {
    int index = -1;
    for (std::size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == var) index = static_cast<int>(i);
    if (index < 0) throw MissingBinding(var);
    return Expr(diff_node(root_, index), vars_);
}

std::string Expr::str() const {
    std::string out;
    print_node(root_.get(), out);
    return out;
}

bool Expr::same_structure(const Expr& other) const {
    return same_node(root_.get(), other.root_.get());
}

bool Expr::depends_on(const std::string& var) const {
    for (std::size_t i = 0; i < vars_->size(); ++i)
        if ((*vars_)[i] == var) return node_depends_on(root_.get(), static_cast<int>(i));
    return false;
}

}  // namespace osserman::expr
