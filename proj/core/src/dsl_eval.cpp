#include <algorithm>
#include <cmath>
#include <string>

#include "nlqm/dsl.hpp"
#include "nlqm/error.hpp"

namespace nlqm {

SlotData::SlotData(const MadelungField& state)
    : SlotData(state.grid(), state.R().values(), state.S().values()) {}

SlotData::SlotData(const Grid& grid, std::span<const double> R,
                   std::span<const double> S)
    : grid_(grid) {
  for (auto& c : columns_) c.resize(grid.n());
  columns_[static_cast<std::size_t>(Slot::x)] = grid.nodes();
  assign(R, S);
}

void SlotData::assign(std::span<const double> R, std::span<const double> S) {
  const std::size_t n = grid_.n();
  if (R.size() != n || S.size() != n) {
    throw ConfigError("slot data: field length does not match the grid");
  }
  auto col = [&](Slot s) -> std::vector<double>& {
    return columns_[static_cast<std::size_t>(s)];
  };
  std::copy(R.begin(), R.end(), col(Slot::R).begin());
  std::copy(S.begin(), S.end(), col(Slot::S).begin());
  deriv1(R, grid_.dx(), grid_.order(), col(Slot::dR));
  deriv1(S, grid_.dx(), grid_.order(), col(Slot::dS));
  deriv2(R, grid_.dx(), grid_.order(), col(Slot::ddR));
  deriv2(S, grid_.dx(), grid_.order(), col(Slot::ddS));
}

SlotView SlotData::view() const noexcept {
  SlotView v;
  for (std::size_t i = 0; i < kSlotCount; ++i) v.columns[i] = columns_[i];
  return v;
}

CompiledExpr::CompiledExpr(const DensityExpr& expr,
                           const ParamBindings& bindings)
    : folded_(substitute(expr, bindings)) {
  const auto unbound = folded_.params();
  if (!unbound.empty()) {
    throw ConfigError("unbound parameter '" + *unbound.begin() + "'");
  }
  zero_ = folded_.is_number(0.0);
  emit(folded_, 1);
}

void CompiledExpr::emit(const DensityExpr& e, std::size_t depth) {
  using Op = DensityExpr::Op;
  max_depth_ = std::max(max_depth_, depth);
  switch (e.op()) {
    case Op::number:
      program_.push_back({Op::number, e.value()});
      return;
    case Op::var:
      program_.push_back({Op::var, 0.0, e.slot()});
      return;
    case Op::param:
      throw ConfigError("unbound parameter '" + e.name() + "'");
    case Op::neg:
    case Op::ln:
      emit(e.lhs(), depth);
      program_.push_back({e.op()});
      return;
    case Op::pow:
      emit(e.lhs(), depth);
      program_.push_back({Op::pow, 0.0, Slot::R, e.exponent()});
      return;
    default:
      emit(e.lhs(), depth);
      emit(e.rhs(), depth + 1);
      program_.push_back({e.op()});
  }
}

namespace {

// A strided read-only column: stride 0 broadcasts a constant.
struct Operand {
  const double* p;
  std::size_t stride;
  double operator[](std::size_t j) const noexcept { return p[j * stride]; }
};

double int_pow(double b, int k) {
  switch (k) {
    case 2:
      return b * b;
    case 3:
      return b * b * b;
    case -1:
      return 1.0 / b;
    case -2:
      return 1.0 / (b * b);
    default:
      return std::pow(b, k);
  }
}

}  // namespace

void CompiledExpr::evaluate(const SlotView& slots, std::span<double> out,
                            std::size_t first_node) const {
  using Op = DensityExpr::Op;
  const std::size_t n = slots.size();
  if (out.size() != n) {
    throw ConfigError("compiled expression: output length mismatch");
  }
  if (zero_) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }

  // Scratch columns are reused across calls on the same thread; time stepping
  // evaluates the same handful of programs many thousands of times.
  thread_local std::vector<std::vector<double>> buffers;
  if (buffers.size() < max_depth_) buffers.resize(max_depth_);
  std::vector<Operand> stack;
  stack.reserve(max_depth_);

  auto target = [&](std::size_t level) -> double* {
    auto& b = buffers[level];
    if (b.size() != n) b.resize(n);
    return b.data();
  };

  for (const Instr& ins : program_) {
    switch (ins.op) {
      case Op::number:
        stack.push_back({&ins.value, 0});
        break;
      case Op::var:
        stack.push_back({slots[ins.slot].data(), 1});
        break;
      case Op::neg: {
        const Operand a = stack.back();
        double* r = target(stack.size() - 1);
        for (std::size_t j = 0; j < n; ++j) r[j] = -a[j];
        stack.back() = {r, 1};
        break;
      }
      case Op::ln: {
        const Operand a = stack.back();
        double* r = target(stack.size() - 1);
        for (std::size_t j = 0; j < n; ++j) {
          const double v = a[j];
          if (!(v > 0.0)) throw EvalError("ln of a non-positive value", first_node + j);
          r[j] = std::log(v);
        }
        stack.back() = {r, 1};
        break;
      }
      case Op::pow: {
        const Operand a = stack.back();
        double* r = target(stack.size() - 1);
        const int k = ins.exponent;
        for (std::size_t j = 0; j < n; ++j) {
          const double v = a[j];
          if (k < 0 && v == 0.0) {
            throw EvalError("negative power of zero", first_node + j);
          }
          r[j] = int_pow(v, k);
        }
        stack.back() = {r, 1};
        break;
      }
      default: {
        const Operand b = stack.back();
        stack.pop_back();
        const Operand a = stack.back();
        double* r = target(stack.size() - 1);
        switch (ins.op) {
          case Op::add:
            for (std::size_t j = 0; j < n; ++j) r[j] = a[j] + b[j];
            break;
          case Op::sub:
            for (std::size_t j = 0; j < n; ++j) r[j] = a[j] - b[j];
            break;
          case Op::mul:
            for (std::size_t j = 0; j < n; ++j) r[j] = a[j] * b[j];
            break;
          case Op::div:
            for (std::size_t j = 0; j < n; ++j) {
              const double d = b[j];
              if (d == 0.0) throw EvalError("division by zero", first_node + j);
              r[j] = a[j] / d;
            }
            break;
          default:
            break;
        }
        stack.back() = {r, 1};
      }
    }
  }

  const Operand top = stack.back();
  for (std::size_t j = 0; j < n; ++j) out[j] = top[j];
}

std::vector<double> CompiledExpr::evaluate(const SlotView& slots) const {
  std::vector<double> out(slots.size());
  evaluate(slots, out);
  return out;
}

ScalarField evaluate(const DensityExpr& expr, const ParamBindings& bindings,
                     const MadelungField& state) {
  const CompiledExpr program(expr, bindings);
  const SlotData data(state);
  return ScalarField(state.grid(), program.evaluate(data.view()));
}

double evaluate_at(const DensityExpr& expr, const ParamBindings& bindings,
                   const std::array<double, kSlotCount>& slot_values) {
  const CompiledExpr program(expr, bindings);
  SlotView view;
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    view.columns[i] = std::span<const double>(&slot_values[i], 1);
  }
  double out = 0.0;
  program.evaluate(view, std::span<double>(&out, 1));
  return out;
}

ScalarField evaluate_potential(const DensityExpr& expr,
                               const ParamBindings& bindings, const Grid& grid) {
  for (Slot s : {Slot::R, Slot::S, Slot::dR, Slot::dS, Slot::ddR, Slot::ddS}) {
    if (expr.references(s)) {
      throw ConfigError("potential may depend only on x, found '" +
                        std::string(slot_name(s)) + "'");
    }
  }
  const CompiledExpr program(expr, bindings);
  const std::vector<double> x = grid.nodes();
  const std::vector<double> zeros(grid.n(), 0.0);
  SlotView view;
  for (auto& c : view.columns) c = zeros;
  view.columns[static_cast<std::size_t>(Slot::x)] = x;
  return ScalarField(grid, program.evaluate(view));
}

ScalarField evaluate_potential(std::string_view text, const Grid& grid,
                               const ParamBindings& bindings) {
  return evaluate_potential(parse(text), bindings, grid);
}

}  // namespace nlqm
