#include "treegibbs/expr.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <system_error>

#include "treegibbs/error.hpp"

namespace treegibbs::expr {

char to_char(Var v) noexcept {
  switch (v) {
    case Var::t: return 't';
    case Var::u: return 'u';
    case Var::v: return 'v';
  }
  return '?';
}

std::string_view to_string(Func f) noexcept {
  switch (f) {
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::abs: return "abs";
  }
  return "?";
}

Ast::Ast(std::vector<Node> nodes, NodeId root, std::string source)
    : nodes_(std::make_shared<const std::vector<Node>>(std::move(nodes))),
      root_(root),
      source_(std::make_shared<const std::string>(std::move(source))) {}

Bindings::Bindings(std::initializer_list<std::pair<Var, double>> values) {
  for (const auto& [var, value] : values) set(var, value);
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Ast run() {
    skip_space();
    if (pos_ == src_.size()) throw SyntaxError(pos_, "empty expression");
    NodeId root = parse_sum();
    skip_space();
    if (pos_ != src_.size()) throw SyntaxError(pos_, "unexpected " + describe_here());
    return Ast(std::move(nodes_), root, std::string(src_));
  }

 private:
  NodeId add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  std::string describe_here() const {
    if (pos_ >= src_.size()) return "end of input";
    return std::string("'") + src_[pos_] + "'";
  }

  NodeId parse_sum() {
    NodeId lhs = parse_product();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      std::size_t at = pos_++;
      NodeId rhs = parse_product();
      lhs = add({Binary{c == '+' ? BinOp::add : BinOp::sub, lhs, rhs}, at});
    }
  }

  NodeId parse_product() {
    NodeId lhs = parse_unary();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      std::size_t at = pos_++;
      NodeId rhs = parse_unary();
      lhs = add({Binary{c == '*' ? BinOp::mul : BinOp::div, lhs, rhs}, at});
    }
  }

  NodeId parse_unary() {
    if (peek() == '-') {
      std::size_t at = pos_++;
      NodeId operand = parse_unary();
      return add({Negate{operand}, at});
    }
    return parse_power();
  }

  NodeId parse_power() {
    NodeId base = parse_primary();
    if (peek() == '^') {
      std::size_t at = pos_++;
      NodeId exponent = parse_unary();
      return add({Binary{BinOp::pow, base, exponent}, at});
    }
    return base;
  }

  NodeId parse_primary() {
    char c = peek();
    std::size_t at = pos_;
    if (c == '(') {
      ++pos_;
      NodeId inner = parse_sum();
      if (peek() != ')') throw SyntaxError(pos_, "expected ')' but found " + describe_here());
      ++pos_;
      return inner;
    }
    if (is_digit(c) || c == '.') return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    throw SyntaxError(at, "unexpected " + describe_here());
  }

  NodeId parse_number() {
    std::size_t start = pos_;
    std::size_t i = pos_;
    std::size_t mantissa_digits = 0;
    while (i < src_.size() && is_digit(src_[i])) ++i, ++mantissa_digits;
    if (i < src_.size() && src_[i] == '.') {
      ++i;
      while (i < src_.size() && is_digit(src_[i])) ++i, ++mantissa_digits;
    }
    if (mantissa_digits == 0) throw SyntaxError(start, "malformed number");
    if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      std::size_t exp_start = j;
      while (j < src_.size() && is_digit(src_[j])) ++j;
      if (j == exp_start) throw SyntaxError(i, "malformed exponent");
      i = j;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + i, value);
    if (ec != std::errc{} || ptr != src_.data() + i || !std::isfinite(value))
      throw SyntaxError(start, "number out of range");
    pos_ = i;
    return add({Literal{value}, start});
  }

  NodeId parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);

    if (name == "t") return add({Variable{Var::t}, start});
    if (name == "u") return add({Variable{Var::u}, start});
    if (name == "v") return add({Variable{Var::v}, start});
    if (name == "pi") return add({NamedConstant{Constant::pi}, start});
    if (name == "e") return add({NamedConstant{Constant::e}, start});

    static constexpr std::pair<std::string_view, Func> kFuncs[] = {
        {"exp", Func::exp}, {"log", Func::log}, {"sqrt", Func::sqrt},
        {"sin", Func::sin}, {"cos", Func::cos}, {"abs", Func::abs}};
    for (const auto& [fname, func] : kFuncs) {
      if (name != fname) continue;
      if (peek() != '(') throw SyntaxError(pos_, "expected '(' after " + std::string(name));
      ++pos_;
      NodeId arg = parse_sum();
      if (peek() != ')') throw SyntaxError(pos_, "expected ')' but found " + describe_here());
      ++pos_;
      return add({Call{func, arg}, start});
    }
    throw UnknownIdentifier(start, std::string(name));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

class Evaluator {
 public:
  Evaluator(const Ast& ast, const Bindings& b) : ast_(ast), bindings_(b) {}

  double eval(NodeId id) const {
    const Node& n = ast_.node(id);
    double r = std::visit([&](const auto& d) { return eval_node(d, n.offset); }, n.data);
    if (!std::isfinite(r)) throw DomainError(n.offset, "non-finite result");
    return r;
  }

 private:
  double eval_node(const Literal& l, std::size_t) const { return l.value; }

  double eval_node(const Variable& v, std::size_t) const {
    auto value = bindings_.get(v.var);
    if (!value) throw MissingBinding(to_char(v.var));
    return *value;
  }

  double eval_node(const NamedConstant& c, std::size_t) const {
    return c.constant == Constant::pi ? std::numbers::pi : std::numbers::e;
  }

  double eval_node(const Negate& n, std::size_t) const { return -eval(n.operand); }

  double eval_node(const Binary& b, std::size_t offset) const {
    double lhs = eval(b.lhs);
    double rhs = eval(b.rhs);
    switch (b.op) {
      case BinOp::add: return lhs + rhs;
      case BinOp::sub: return lhs - rhs;
      case BinOp::mul: return lhs * rhs;
      case BinOp::div:
        if (rhs == 0.0) throw DomainError(offset, "division by zero");
        return lhs / rhs;
      case BinOp::pow:
        if (lhs < 0.0 && std::trunc(rhs) != rhs)
          throw DomainError(offset, "negative base with non-integer exponent");
        if (lhs == 0.0 && rhs < 0.0) throw DomainError(offset, "zero base with negative exponent");
        return std::pow(lhs, rhs);
    }
    return 0.0;
  }

  double eval_node(const Call& c, std::size_t offset) const {
    double x = eval(c.argument);
    switch (c.func) {
      case Func::exp: return std::exp(x);
      case Func::log:
        if (!(x > 0.0)) throw DomainError(offset, "log of non-positive argument");
        return std::log(x);
      case Func::sqrt:
        if (x < 0.0) throw DomainError(offset, "sqrt of negative argument");
        return std::sqrt(x);
      case Func::sin: return std::sin(x);
      case Func::cos: return std::cos(x);
      case Func::abs: return std::fabs(x);
    }
    return 0.0;
  }

  const Ast& ast_;
  const Bindings& bindings_;
};

// Binding strength used by pretty(): higher binds tighter.
constexpr int kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5;

int precedence(const Node& n) {
  if (const auto* b = std::get_if<Binary>(&n.data)) {
    switch (b->op) {
      case BinOp::add:
      case BinOp::sub: return kSum;
      case BinOp::mul:
      case BinOp::div: return kProduct;
      case BinOp::pow: return kPower;
    }
  }
  if (std::holds_alternative<Negate>(n.data)) return kUnary;
  return kAtom;
}

void print(const Ast& ast, NodeId id, std::string& out);

void print_wrapped(const Ast& ast, NodeId id, bool parens, std::string& out) {
  if (parens) out += '(';
  print(ast, id, out);
  if (parens) out += ')';
}

void print(const Ast& ast, NodeId id, std::string& out) {
  const Node& n = ast.node(id);
  if (const auto* l = std::get_if<Literal>(&n.data)) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, l->value);
    out.append(buf, res.ptr);
  } else if (const auto* v = std::get_if<Variable>(&n.data)) {
    out += to_char(v->var);
  } else if (const auto* c = std::get_if<NamedConstant>(&n.data)) {
    out += c->constant == Constant::pi ? "pi" : "e";
  } else if (const auto* neg = std::get_if<Negate>(&n.data)) {
    out += '-';
    print_wrapped(ast, neg->operand, precedence(ast.node(neg->operand)) < kUnary, out);
  } else if (const auto* call = std::get_if<Call>(&n.data)) {
    out += to_string(call->func);
    out += '(';
    print(ast, call->argument, out);
    out += ')';
  } else if (const auto* b = std::get_if<Binary>(&n.data)) {
    int lp = precedence(ast.node(b->lhs));
    int rp = precedence(ast.node(b->rhs));
    switch (b->op) {
      case BinOp::add:
      case BinOp::sub:
        print_wrapped(ast, b->lhs, lp < kSum, out);
        out += b->op == BinOp::add ? " + " : " - ";
        print_wrapped(ast, b->rhs, rp <= kSum, out);
        break;
      case BinOp::mul:
      case BinOp::div:
        print_wrapped(ast, b->lhs, lp < kProduct, out);
        out += b->op == BinOp::mul ? " * " : " / ";
        print_wrapped(ast, b->rhs, rp <= kProduct, out);
        break;
      case BinOp::pow:
        print_wrapped(ast, b->lhs, lp < kAtom, out);
        out += '^';
        print_wrapped(ast, b->rhs, rp < kUnary, out);
        break;
    }
  }
}

}  // namespace

Ast parse(std::string_view source) { return Parser(source).run(); }

double evaluate(const Ast& ast, const Bindings& bindings) {
  return Evaluator(ast, bindings).eval(ast.root_id());
}

VarSet free_variables(const Ast& ast) {
  VarSet vars;
  for (std::size_t i = 0; i < ast.size(); ++i) {
    if (const auto* v = std::get_if<Variable>(&ast.node(static_cast<NodeId>(i)).data))
      vars.insert(v->var);
  }
  return vars;
}

std::string pretty(const Ast& ast) {
  std::string out;
  print(ast, ast.root_id(), out);
  return out;
}

}  // namespace treegibbs::expr
