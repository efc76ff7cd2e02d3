#include "etasol/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace etasol {

namespace {

bool is_constant_name(std::string_view name) { return name == "pi" || name == "e"; }

double constant_value(std::string_view name) { return name == "pi" ? std::numbers::pi : std::numbers::e; }

ExprNodePtr make_node(NodeKind kind, std::vector<ExprNodePtr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_space();
    ExprNodePtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("expected operator or end of input");
    return Expr(std::move(e));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::string found = pos_ < text_.size() ? std::string("'") + text_[pos_] + "'" : "end of input";
    throw ParseError("syntax error: " + what + ", found " + found, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      skip_space();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ExprNodePtr parse_sum() {
    ExprNodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(NodeKind::Add, {lhs, parse_product()});
      } else if (accept('-')) {
        lhs = make_node(NodeKind::Sub, {lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr parse_product() {
    ExprNodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(NodeKind::Mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make_node(NodeKind::Div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  ExprNodePtr parse_unary() {
    if (accept('-')) return make_node(NodeKind::Neg, {parse_unary()});
    return parse_power();
  }

  ExprNodePtr parse_power() {
    ExprNodePtr base = parse_primary();
    if (accept('^')) return make_node(NodeKind::Pow, {base, parse_unary()});
    return base;
  }

  ExprNodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected operand");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      ExprNodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail("expected operand");
  }

  ExprNodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) {
      pos_ = start;
      fail("malformed number");
    }
    // Exponent only when a digit follows, so "2e" is 2 followed by the constant e.
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v)) {
      const std::size_t end = pos_;
      pos_ = start;
      throw ParseError("number out of range '" + std::string(text_.substr(start, end - start)) + "'", start);
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = v;
    skip_space();
    return n;
  }

  ExprNodePtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static const std::pair<std::string_view, Function> kFunctions[] = {
          {"exp", Function::Exp}, {"ln", Function::Ln},     {"sin", Function::Sin},
          {"cos", Function::Cos}, {"sqrt", Function::Sqrt}, {"pow", Function::Pow}};
      const auto* it = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                    [&](const auto& f) { return f.first == name; });
      if (it == std::end(kFunctions)) throw ParseError("unknown function '" + name + "'", start);
      ++pos_;
      auto n = std::make_shared<ExprNode>();
      n->kind = NodeKind::Call;
      n->function = it->second;
      n->args.push_back(parse_sum());
      if (it->second == Function::Pow) {
        expect(',');
        n->args.push_back(parse_sum());
      }
      expect(')');
      return n;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Identifier;
    n->name = std::move(name);
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

int precedence(const ExprNode& n) {
  switch (n.kind) {
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

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

void print(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print(child, out);
  if (parens) out += ')';
}

void print(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number:
      if (n.number < 0.0 || std::signbit(n.number)) {
        out += "(-" + format_number(-n.number) + ")";
      } else {
        out += format_number(n.number);
      }
      return;
    case NodeKind::Identifier:
      out += n.name;
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(*n.args[0], precedence(*n.args[0]) < 3, out);
      return;
    case NodeKind::Call:
      out += function_name(n.function);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i > 0) out += ", ";
        print(*n.args[i], out);
      }
      out += ')';
      return;
    case NodeKind::Pow:
      print_child(*n.args[0], precedence(*n.args[0]) <= 4, out);
      out += '^';
      // The exponent is parsed as a unary, so a negation needs no parentheses.
      print_child(*n.args[1], precedence(*n.args[1]) < 3, out);
      return;
    default: {
      const int p = precedence(n);
      const char* op = n.kind == NodeKind::Add ? " + " : n.kind == NodeKind::Sub ? " - " : n.kind == NodeKind::Mul ? "*" : "/";
      print_child(*n.args[0], precedence(*n.args[0]) < p, out);
      out += op;
      print_child(*n.args[1], precedence(*n.args[1]) <= p, out);
      return;
    }
  }
}

void print_sexpr(const ExprNode& n, std::string& out) {
  auto list = [&](std::string_view head) {
    out += head;
    out += '(';
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      if (i > 0) out += ", ";
      print_sexpr(*n.args[i], out);
    }
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Number:
      out += format_number(n.number);
      return;
    case NodeKind::Identifier:
      out += n.name;
      return;
    case NodeKind::Neg:
      return list("Neg");
    case NodeKind::Add:
      return list("Add");
    case NodeKind::Sub:
      return list("Sub");
    case NodeKind::Mul:
      return list("Mul");
    case NodeKind::Div:
      return list("Div");
    case NodeKind::Pow:
      return list("Pow");
    case NodeKind::Call:
      out += "Call(";
      out += function_name(n.function);
      for (const auto& a : n.args) {
        out += ", ";
        print_sexpr(*a, out);
      }
      out += ')';
      return;
  }
}

bool equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Identifier:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Call:
      if (a.function != b.function) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

void collect_identifiers(const ExprNode& n, std::set<std::string>& out) {
  if (n.kind == NodeKind::Identifier) out.insert(n.name);
  for (const auto& a : n.args) collect_identifiers(*a, out);
}

ExprNodePtr rename_node(const ExprNodePtr& n, const std::vector<std::pair<std::string, std::string>>& mapping) {
  if (n->kind == NodeKind::Identifier) {
    for (const auto& [from, to] : mapping) {
      if (from == n->name) {
        auto r = std::make_shared<ExprNode>(*n);
        r->name = to;
        return r;
      }
    }
    return n;
  }
  if (n->args.empty()) return n;
  auto r = std::make_shared<ExprNode>(*n);
  for (auto& a : r->args) a = rename_node(a, mapping);
  return r;
}

/// Value of a subtree that mentions no coordinates; nullopt otherwise.
std::optional<double> fold_constant(const ExprNode& n, const std::vector<std::string>& coords) {
  std::set<std::string> ids;
  collect_identifiers(n, ids);
  for (const auto& id : ids) {
    if (std::find(coords.begin(), coords.end(), id) != coords.end() || !is_constant_name(id)) return std::nullopt;
  }
  CompiledExpr c(Expr(std::make_shared<ExprNode>(n)), std::span<const std::string>());
  return c.eval(std::span<const double>());
}

std::optional<int> integer_literal(const ExprNode& n) {
  const ExprNode* p = &n;
  int sign = 1;
  if (p->kind == NodeKind::Neg) {
    sign = -1;
    p = p->args[0].get();
  }
  if (p->kind != NodeKind::Number) return std::nullopt;
  if (p->number != std::floor(p->number) || p->number > 64.0) return std::nullopt;
  return sign * static_cast<int>(p->number);
}

void collect_powers(const ExprNode& n, std::vector<const ExprNode*>& out) {
  if (n.kind == NodeKind::Pow || (n.kind == NodeKind::Call && n.function == Function::Pow)) out.push_back(&n);
  for (const auto& a : n.args) collect_powers(*a, out);
}

}  // namespace

std::string_view function_name(Function f) noexcept {
  switch (f) {
    case Function::Exp:
      return "exp";
    case Function::Ln:
      return "ln";
    case Function::Sin:
      return "sin";
    case Function::Cos:
      return "cos";
    case Function::Sqrt:
      return "sqrt";
    case Function::Pow:
      return "pow";
  }
  return "?";
}

Expr Expr::number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Number;
  n->number = v;
  return Expr(std::move(n));
}

Expr Expr::identifier(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Identifier;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::call(Function f, std::vector<Expr> args) {
  const std::size_t arity = f == Function::Pow ? 2 : 1;
  if (args.size() != arity) throw ValidationError(std::string(function_name(f)) + " takes " + std::to_string(arity) + " argument(s)");
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Call;
  n->function = f;
  for (auto& a : args) n->args.push_back(a.root());
  return Expr(std::move(n));
}

bool Expr::is_number(double v) const noexcept { return root_->kind == NodeKind::Number && root_->number == v; }

std::vector<std::string> Expr::identifiers() const {
  std::set<std::string> ids;
  collect_identifiers(*root_, ids);
  return {ids.begin(), ids.end()};
}

Expr Expr::rename(const std::vector<std::pair<std::string, std::string>>& mapping) const {
  return Expr(rename_node(root_, mapping));
}

bool operator==(const Expr& a, const Expr& b) { return equal(*a.root_, *b.root_); }

Expr operator-(const Expr& a) { return Expr(make_node(NodeKind::Neg, {a.root()})); }
Expr operator+(const Expr& a, const Expr& b) { return Expr(make_node(NodeKind::Add, {a.root(), b.root()})); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(make_node(NodeKind::Sub, {a.root(), b.root()})); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(make_node(NodeKind::Mul, {a.root(), b.root()})); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(make_node(NodeKind::Div, {a.root(), b.root()})); }
Expr pow(const Expr& base, const Expr& exponent) {
  return Expr(make_node(NodeKind::Pow, {base.root(), exponent.root()}));
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e.node(), out);
  return out;
}

std::string to_sexpr(const Expr& e) {
  std::string out;
  print_sexpr(e.node(), out);
  return out;
}

void validate(const Expr& e, std::span<const std::string> coords) {
  std::vector<std::string> unknown;
  for (const auto& id : e.identifiers()) {
    if (std::find(coords.begin(), coords.end(), id) == coords.end() && !is_constant_name(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown identifier";
    msg += unknown.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
    throw ValidationError(msg);
  }
}

bool Box::contains(std::span<const double> p) const noexcept {
  if (p.size() != lower.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  }
  return true;
}

void validate_powers_on_box(const Expr& e, std::span<const std::string> coords, const Box& box) {
  validate(e, coords);
  if (box.dim() != coords.size()) throw DimensionError("box dimension does not match the coordinate count");
  std::vector<const ExprNode*> powers;
  collect_powers(e.node(), powers);
  const std::vector<std::string> names(coords.begin(), coords.end());
  constexpr int kPerAxis = 5;
  for (const ExprNode* p : powers) {
    if (integer_literal(*p->args[1])) continue;
    CompiledExpr base(Expr(p->args[0]), coords);
    const std::size_t n = coords.size();
    std::vector<int> counter(n, 0);
    std::vector<double> point(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) {
        point[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * counter[i] / (kPerAxis - 1);
      }
      double v = 0.0;
      try {
        v = base.eval(point);
      } catch (const DomainError&) {
        v = -1.0;
      }
      if (!(v > 0.0)) {
        throw ValidationError("power '" + to_string(Expr(std::make_shared<ExprNode>(*p))) +
                              "' needs a constant integer exponent: its base is not positive on the domain");
      }
      std::size_t axis = 0;
      while (axis < n && ++counter[axis] == kPerAxis) counter[axis++] = 0;
      if (axis == n) break;
    }
  }
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------

CompiledExpr::CompiledExpr(const Expr& e, std::span<const std::string> coords)
    : nvars_(static_cast<int>(coords.size())) {
  validate(e, coords);
  const std::vector<std::string> names(coords.begin(), coords.end());
  emit(e.node(), names);
}

void CompiledExpr::emit(const ExprNode& n, const std::vector<std::string>& coords) {
  switch (n.kind) {
    case NodeKind::Number:
      code_.push_back({OpCode::Const, n.number, 0});
      return;
    case NodeKind::Identifier: {
      const auto it = std::find(coords.begin(), coords.end(), n.name);
      if (it != coords.end()) {
        code_.push_back({OpCode::Var, 0.0, static_cast<int>(it - coords.begin())});
      } else {
        code_.push_back({OpCode::Const, constant_value(n.name), 0});
      }
      return;
    }
    case NodeKind::Neg:
      emit(*n.args[0], coords);
      code_.push_back({OpCode::Neg});
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      emit(*n.args[0], coords);
      emit(*n.args[1], coords);
      const OpCode op = n.kind == NodeKind::Add   ? OpCode::Add
                        : n.kind == NodeKind::Sub ? OpCode::Sub
                        : n.kind == NodeKind::Mul ? OpCode::Mul
                                                  : OpCode::Div;
      code_.push_back({op});
      return;
    }
    case NodeKind::Pow:
      break;
    case NodeKind::Call:
      if (n.function != Function::Pow) {
        emit(*n.args[0], coords);
        static constexpr OpCode kOps[] = {OpCode::Exp, OpCode::Ln, OpCode::Sin, OpCode::Cos, OpCode::Sqrt};
        code_.push_back({kOps[static_cast<int>(n.function)]});
        return;
      }
      break;
  }
  // Powers: a^b and pow(a, b).
  const ExprNode& base = *n.args[0];
  const ExprNode& exponent = *n.args[1];
  emit(base, coords);
  if (const auto k = integer_literal(exponent)) {
    code_.push_back({OpCode::PowInt, 0.0, *k});
  } else if (const auto c = fold_constant(exponent, coords)) {
    code_.push_back({OpCode::PowConst, *c, 0});
  } else {
    emit(exponent, coords);
    code_.push_back({OpCode::PowGeneral});
  }
}

}  // namespace etasol
