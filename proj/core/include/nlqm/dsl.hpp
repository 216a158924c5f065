#pragma once

// Lagrangian-density expressions in the Madelung slots R, S, dR, dS, ddR, ddS
// (and x for external potentials).
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' integer)?          integer may carry a leading '-'
//   atom   := number | identifier | 'ln' '(' expr ')' | '(' expr ')'
//
// '^' binds tightest and chains right-to-left over integer literals, so
// R^2^3 == R^8. Unary minus binds looser than '^': -R^2 == -(R^2).

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlqm/grid.hpp"

namespace nlqm {

enum class Slot { R, S, dR, dS, ddR, ddS, x };
inline constexpr std::size_t kSlotCount = 7;

std::string_view slot_name(Slot s) noexcept;
std::optional<Slot> slot_from_name(std::string_view name) noexcept;

using ParamBindings = std::map<std::string, double, std::less<>>;

/// Immutable expression tree. Copies share structure.
class DensityExpr {
 public:
  enum class Op { number, param, var, neg, add, sub, mul, div, pow, ln };

  DensityExpr();  // the literal 0

  static DensityExpr number(double value);
  static DensityExpr param(std::string name);
  static DensityExpr var(Slot slot);
  static DensityExpr neg(DensityExpr arg);
  static DensityExpr binary(Op op, DensityExpr lhs, DensityExpr rhs);
  static DensityExpr pow(DensityExpr base, int exponent);
  static DensityExpr ln(DensityExpr arg);

  Op op() const noexcept;
  double value() const;             // number
  const std::string& name() const;  // param
  Slot slot() const;                // var
  int exponent() const;             // pow
  const DensityExpr& lhs() const;   // binary ops; base of pow; arg of neg/ln
  const DensityExpr& rhs() const;   // binary ops

  bool is_number(double v) const noexcept;
  bool references(Slot s) const;
  std::set<std::string> params() const;
  std::size_t size() const;  // node count

  /// Minimal-parenthesis rendering; parse(str()) reproduces the same tree.
  std::string str() const;

  friend bool operator==(const DensityExpr& a, const DensityExpr& b);

 private:
  struct Node;
  explicit DensityExpr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

DensityExpr operator+(DensityExpr a, DensityExpr b);
DensityExpr operator-(DensityExpr a, DensityExpr b);
DensityExpr operator*(DensityExpr a, DensityExpr b);
DensityExpr operator/(DensityExpr a, DensityExpr b);
DensityExpr operator-(DensityExpr a);

/// Throws ParseError (a ConfigError) with the offending column.
DensityExpr parse(std::string_view text);

/// Exact partial derivative treating the seven slots as independent.
/// Only trivial identities are folded (0*e, 1*e, e+0, e^0, e^1).
DensityExpr partial(const DensityExpr& expr, Slot slot);

/// Replaces every bound parameter by its value and folds literal arithmetic,
/// including 0*e -> 0. Unbound parameters are left in place.
DensityExpr substitute(const DensityExpr& expr, const ParamBindings& bindings);

/// Seven equally long columns, one per slot.
struct SlotView {
  std::array<std::span<const double>, kSlotCount> columns;
  std::span<const double> operator[](Slot s) const noexcept {
    return columns[static_cast<std::size_t>(s)];
  }
  std::size_t size() const noexcept { return columns[0].size(); }
};

/// Owns the slot columns of a Madelung state (derivatives via the grid's
/// stencils).
class SlotData {
 public:
  explicit SlotData(const MadelungField& state);
  SlotData(const Grid& grid, std::span<const double> R,
           std::span<const double> S);

  /// Recomputes every column for new fields on the same grid, reusing storage.
  void assign(std::span<const double> R, std::span<const double> S);

  const Grid& grid() const noexcept { return grid_; }
  SlotView view() const noexcept;
  std::span<const double> operator[](Slot s) const noexcept {
    return columns_[static_cast<std::size_t>(s)];
  }

 private:
  Grid grid_;
  std::array<std::vector<double>, kSlotCount> columns_;
};

/// Expression compiled against fixed bindings into a postfix program that is
/// evaluated column-at-a-time.
class CompiledExpr {
 public:
  /// Throws ConfigError if a parameter is unbound.
  CompiledExpr(const DensityExpr& expr, const ParamBindings& bindings);

  /// Writes one value per node into `out`. Throws EvalError naming the first
  /// offending node. `first_node` offsets reported node indices.
  void evaluate(const SlotView& slots, std::span<double> out,
                std::size_t first_node = 0) const;
  std::vector<double> evaluate(const SlotView& slots) const;

  bool is_zero() const noexcept { return zero_; }
  const DensityExpr& expr() const noexcept { return folded_; }

 private:
  struct Instr {
    DensityExpr::Op op;
    double value = 0.0;
    Slot slot = Slot::R;
    int exponent = 0;
  };
  void emit(const DensityExpr& e, std::size_t depth);

  DensityExpr folded_;
  std::vector<Instr> program_;
  std::size_t max_depth_ = 0;
  bool zero_ = false;
};

/// Pointwise evaluation on a state. Throws EvalError / ConfigError.
ScalarField evaluate(const DensityExpr& expr, const ParamBindings& bindings,
                     const MadelungField& state);

/// Single-point evaluation with explicit slot values (indexed by Slot).
double evaluate_at(const DensityExpr& expr, const ParamBindings& bindings,
                   const std::array<double, kSlotCount>& slot_values);

/// Evaluates a potential that may reference only x (and parameters).
/// Throws ConfigError if it references R/S slots.
ScalarField evaluate_potential(const DensityExpr& expr,
                               const ParamBindings& bindings, const Grid& grid);
ScalarField evaluate_potential(std::string_view text, const Grid& grid,
                               const ParamBindings& bindings = {});

}  // namespace nlqm
