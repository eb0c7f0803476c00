#pragma once

// Small expression language for nonlinearities, coefficients and barriers.
//
// Grammar:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom  := NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//
// Built-in functions: exp, log, min, max, abs.  '^' is right-associative and
// binds tighter than unary minus.  Named constants are substituted at parse
// time, so evaluation never allocates and never looks anything up.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osserman::expr {

enum class NodeKind {
    Constant,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Exp,
    Log,
    Min,
    Max,
    Abs,
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double value = 0.0;      // Constant
    int var_index = -1;      // Variable
    std::string var_name;    // Variable
    NodePtr a, b;
};

/// Immutable parsed expression over a declared, ordered variable set.
class Expr {
public:
    Expr() = default;

    /// Parse `source` over the given variables; identifiers found in `params`
    /// are replaced by their numeric value.  Throws SyntaxError, EmptyInput
    /// or UnknownIdentifier.
    static Expr parse(std::string_view source,
                      const std::vector<std::string>& variables,
                      const std::map<std::string, double>& params = {});

    /// Evaluate with bindings aligned to variables().  Throws DomainError on
    /// log of a non-positive value, fractional powers of negative bases,
    /// 0^negative, division by zero, or any non-finite intermediate.
    double operator()(std::span<const double> bindings) const;

    /// Convenience evaluation by name.  Throws MissingBinding.
    double eval(const std::map<std::string, double>& bindings) const;

    /// Symbolic partial derivative.  Throws NonDifferentiableNode when a
    /// min/max/abs node sits on the path of `var`.
    Expr derivative(const std::string& var) const;

    /// Pretty-print with minimal parentheses; parse(str()) reproduces the
    /// exact tree.
    std::string str() const;

    bool same_structure(const Expr& other) const;
    bool depends_on(const std::string& var) const;

    const std::vector<std::string>& variables() const { return *vars_; }
    const NodePtr& root() const { return root_; }

    bool valid() const { return root_ != nullptr; }

private:
    Expr(NodePtr root, std::shared_ptr<const std::vector<std::string>> vars)
        : root_(std::move(root)), vars_(std::move(vars)) {}

    NodePtr root_;
    std::shared_ptr<const std::vector<std::string>> vars_ =
        std::make_shared<const std::vector<std::string>>();
};

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace osserman::expr
