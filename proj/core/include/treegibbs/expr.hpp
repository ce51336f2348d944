#pragma once

// Arithmetic expression language for model functions over the spin
// variables t, u, v.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | ident | ident '(' expr ')' | '(' expr ')'
//
// Identifiers: variables t, u, v; constants pi, e; functions exp, log, sqrt,
// sin, cos, abs.  So "-2^2" is -4 and "2^3^2" is 512.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace treegibbs::expr {

enum class Var : std::uint8_t { t, u, v };
enum class Func : std::uint8_t { exp, log, sqrt, sin, cos, abs };
enum class BinOp : std::uint8_t { add, sub, mul, div, pow };
enum class Constant : std::uint8_t { pi, e };

char to_char(Var v) noexcept;
std::string_view to_string(Func f) noexcept;

using NodeId = std::uint32_t;

struct Literal {
  double value;
};
struct Variable {
  Var var;
};
struct NamedConstant {
  Constant constant;
};
struct Negate {
  NodeId operand;
};
struct Binary {
  BinOp op;
  NodeId lhs;
  NodeId rhs;
};
struct Call {
  Func func;
  NodeId argument;
};

struct Node {
  std::variant<Literal, Variable, NamedConstant, Negate, Binary, Call> data;
  std::size_t offset;  // byte offset of the node's token in the source
};

/// Immutable parsed expression. Copies share the node storage.
class Ast {
 public:
  Ast(std::vector<Node> nodes, NodeId root, std::string source);

  const Node& node(NodeId id) const { return (*nodes_)[id]; }
  const Node& root() const { return node(root_); }
  NodeId root_id() const noexcept { return root_; }
  std::size_t size() const noexcept { return nodes_->size(); }
  const std::string& source() const noexcept { return *source_; }

 private:
  std::shared_ptr<const std::vector<Node>> nodes_;
  NodeId root_;
  std::shared_ptr<const std::string> source_;
};

class Bindings {
 public:
  Bindings() = default;
  Bindings(std::initializer_list<std::pair<Var, double>> values);

  Bindings& set(Var v, double value) {
    values_[static_cast<std::size_t>(v)] = value;
    return *this;
  }
  std::optional<double> get(Var v) const { return values_[static_cast<std::size_t>(v)]; }

 private:
  std::array<std::optional<double>, 3> values_{};
};

using VarSet = std::set<Var>;

/// Throws SyntaxError / UnknownIdentifier.
Ast parse(std::string_view source);

/// IEEE double evaluation, operands left to right. Throws DomainError for
/// log(x<=0), sqrt(x<0), negative base with non-integer exponent and any
/// non-finite intermediate; MissingBinding for unbound variables.
double evaluate(const Ast& ast, const Bindings& bindings);

VarSet free_variables(const Ast& ast);

/// Canonical text: minimal parentheses, single spaces around binary
/// operators, shortest round-trip literals. parse(pretty(a)) pretty-prints
/// identically.
std::string pretty(const Ast& ast);

}  // namespace treegibbs::expr
