#pragma once

// Scalar expressions over chart coordinates.
//
// Grammar (whitespace ignored):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | identifier | call | '(' sum ')'
//   call    := ('exp'|'ln'|'sin'|'cos'|'sqrt') '(' sum ')' | 'pow' '(' sum ',' sum ')'
//
// `pi` and `e` are predefined constants. An integer-literal exponent compiles
// to repeated multiplication; any other exponent goes through exp(b ln a).

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "etasol/error.hpp"
#include "etasol/jet.hpp"

namespace etasol {

enum class NodeKind { Number, Identifier, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Exp, Ln, Sin, Cos, Sqrt, Pow };

std::string_view function_name(Function f) noexcept;

struct ExprNode;
using ExprNodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  double number = 0.0;          // Number
  std::string name;             // Identifier
  Function function = Function::Exp;  // Call
  std::vector<ExprNodePtr> args;  // operands / call arguments
};

/// Immutable expression tree. Subtrees are shared between copies.
class Expr {
 public:
  Expr() : Expr(number(0.0)) {}
  explicit Expr(ExprNodePtr root) : root_(std::move(root)) {}

  static Expr number(double v);
  static Expr identifier(std::string name);
  static Expr call(Function f, std::vector<Expr> args);

  const ExprNode& node() const noexcept { return *root_; }
  const ExprNodePtr& root() const noexcept { return root_; }

  /// True when the tree is a number literal equal to v.
  bool is_number(double v) const noexcept;

  /// Identifier names used, sorted, without duplicates (constants included).
  std::vector<std::string> identifiers() const;

  /// Rename identifiers; names missing from the map are kept.
  Expr rename(const std::vector<std::pair<std::string, std::string>>& mapping) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  ExprNodePtr root_;
};

Expr operator-(const Expr& a);
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Expr& exponent);

/// Parse an expression string. Throws ParseError with the byte offset of the problem.
Expr parse(std::string_view text);

/// Infix text with the minimal parentheses needed to reparse to the same tree.
std::string to_string(const Expr& e);

/// Structural form, e.g. "Div(1, Pow(z, 2))".
std::string to_sexpr(const Expr& e);

/// Throws ValidationError naming every identifier not in coords and not a constant.
void validate(const Expr& e, std::span<const std::string> coords);

/// Axis-aligned sampling box.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return lower.size(); }
  bool contains(std::span<const double> p) const noexcept;
};

/// Checks that every power with a non-integer-literal exponent has a positive base on the box
/// (sampled on a 5-per-axis lattice including the corners). Throws ValidationError.
void validate_powers_on_box(const Expr& e, std::span<const std::string> coords, const Box& box);

/// Expression bound to a coordinate list and flattened to a postfix program.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, std::span<const std::string> coords);

  int nvars() const noexcept { return nvars_; }

  double eval(std::span<const double> point) const { return run<double>(point, nullptr); }

  /// Value and partials through order K, with the coordinates as jet variables.
  template <int K>
  Jet<K> eval_jet(std::span<const double> point) const {
    return run<Jet<K>>(point, nullptr);
  }

  /// Evaluate with caller-supplied values for the coordinates (for composition).
  template <typename T>
  T eval_with(std::span<const T> vars) const {
    return run<T>({}, &vars);
  }

 private:
  enum class OpCode { Const, Var, Neg, Add, Sub, Mul, Div, PowInt, PowConst, PowGeneral, Exp, Ln, Sin, Cos, Sqrt };
  struct Instr {
    OpCode op;
    double number = 0.0;
    int index = 0;
  };

  void emit(const ExprNode& n, const std::vector<std::string>& coords);

  template <typename T>
  T run(std::span<const double> point, const std::span<const T>* vars) const;

  std::vector<Instr> code_;
  int nvars_ = 0;
};

namespace detail {

template <typename T>
T make_constant(int nvars, double c) {
  if constexpr (std::is_same_v<T, double>) {
    (void)nvars;
    return c;
  } else {
    return T(nvars, c);
  }
}

template <typename T>
T make_variable(std::span<const double> point, int index) {
  if constexpr (std::is_same_v<T, double>) {
    return point[static_cast<std::size_t>(index)];
  } else {
    return T::variable(point, index);
  }
}

inline double value_of(double x) { return x; }
template <int K>
double value_of(const Jet<K>& x) {
  return x.value();
}

inline double checked_ln(double x) {
  if (!(x > 0.0)) throw DomainError("ln of non-positive value " + format_value(x));
  return std::log(x);
}
inline double checked_sqrt(double x) {
  if (!(x > 0.0) && x != 0.0) throw DomainError("sqrt of negative value " + format_value(x));
  return std::sqrt(x);
}
inline double checked_pow(double x, double c) {
  if (c != std::floor(c) && !(x > 0.0)) {
    throw DomainError("non-integer power of non-positive value " + format_value(x));
  }
  if (c < 0.0 && x == 0.0) throw DomainError("negative power of zero");
  return std::pow(x, c);
}
inline double checked_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a / b;
}

inline double ln_of(double x) { return checked_ln(x); }
template <int K>
Jet<K> ln_of(const Jet<K>& x) {
  return log(x);
}
inline double sqrt_of(double x) { return checked_sqrt(x); }
template <int K>
Jet<K> sqrt_of(const Jet<K>& x) {
  return sqrt(x);
}
inline double pow_of(double x, double c) { return checked_pow(x, c); }
template <int K>
Jet<K> pow_of(const Jet<K>& x, double c) {
  return pow(x, c);
}
inline double div_of(double a, double b) { return checked_div(a, b); }
template <int K>
Jet<K> div_of(const Jet<K>& a, const Jet<K>& b) {
  return a / b;
}

}  // namespace detail

template <typename T>
T CompiledExpr::run(std::span<const double> point, const std::span<const T>* vars) const {
  using std::cos;
  using std::exp;
  using std::sin;
  int nvars = nvars_;
  if (vars != nullptr) {
    if (static_cast<int>(vars->size()) != nvars_) {
      throw DimensionError("expected " + std::to_string(nvars_) + " coordinate values, got " +
                           std::to_string(vars->size()));
    }
    if constexpr (!std::is_same_v<T, double>) {
      if (!vars->empty()) nvars = (*vars)[0].nvars();
    }
  } else if (static_cast<int>(point.size()) != nvars_) {
    throw DimensionError("expected a point with " + std::to_string(nvars_) + " coordinates, got " +
                         std::to_string(point.size()));
  }

  std::vector<T> stack;
  stack.reserve(8);
  auto pop = [&stack]() {
    T v = std::move(stack.back());
    stack.pop_back();
    return v;
  };
  for (const Instr& in : code_) {
    switch (in.op) {
      case OpCode::Const:
        stack.push_back(detail::make_constant<T>(nvars, in.number));
        break;
      case OpCode::Var:
        if (vars != nullptr) {
          stack.push_back((*vars)[static_cast<std::size_t>(in.index)]);
        } else {
          stack.push_back(detail::make_variable<T>(point, in.index));
        }
        break;
      case OpCode::Neg:
        stack.back() = -stack.back();
        break;
      case OpCode::Add: {
        T b = pop();
        stack.back() = stack.back() + b;
        break;
      }
      case OpCode::Sub: {
        T b = pop();
        stack.back() = stack.back() - b;
        break;
      }
      case OpCode::Mul: {
        T b = pop();
        stack.back() = stack.back() * b;
        break;
      }
      case OpCode::Div: {
        T b = pop();
        stack.back() = detail::div_of(stack.back(), b);
        break;
      }
      case OpCode::PowInt: {
        const int k = in.index;
        const T base = pop();
        T acc = detail::make_constant<T>(nvars, 1.0);
        if (k != 0) {
          acc = base;
          for (int i = 1; i < (k < 0 ? -k : k); ++i) acc = acc * base;
        }
        if (k < 0) acc = detail::div_of(detail::make_constant<T>(nvars, 1.0), acc);
        stack.push_back(std::move(acc));
        break;
      }
      case OpCode::PowConst:
        stack.back() = detail::pow_of(stack.back(), in.number);
        break;
      case OpCode::PowGeneral: {
        T expo = pop();
        T base = pop();
        stack.push_back(exp(expo * detail::ln_of(base)));
        break;
      }
      case OpCode::Exp:
        stack.back() = exp(stack.back());
        break;
      case OpCode::Ln:
        stack.back() = detail::ln_of(stack.back());
        break;
      case OpCode::Sin:
        stack.back() = sin(stack.back());
        break;
      case OpCode::Cos:
        stack.back() = cos(stack.back());
        break;
      case OpCode::Sqrt:
        stack.back() = detail::sqrt_of(stack.back());
        break;
    }
  }
  return pop();
}

}  // namespace etasol
