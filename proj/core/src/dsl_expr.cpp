#include <cassert>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "nlqm/dsl.hpp"

namespace nlqm {

namespace {
constexpr std::array<std::string_view, kSlotCount> kSlotNames = {
    "R", "S", "dR", "dS", "ddR", "ddS", "x"};
}

std::string_view slot_name(Slot s) noexcept {
  return kSlotNames[static_cast<std::size_t>(s)];
}

std::optional<Slot> slot_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kSlotNames.size(); ++i) {
    if (kSlotNames[i] == name) return static_cast<Slot>(i);
  }
  return std::nullopt;
}

struct DensityExpr::Node {
  Op op = Op::number;
  double value = 0.0;
  std::string name;
  Slot slot = Slot::R;
  int exponent = 0;
  // Leaves keep null children; default-constructing them would recurse.
  DensityExpr lhs{std::shared_ptr<const Node>()};
  DensityExpr rhs{std::shared_ptr<const Node>()};
};

DensityExpr::DensityExpr(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

DensityExpr::DensityExpr() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::make_shared<Node>();
    return std::shared_ptr<const Node>(std::move(n));
  }();
  node_ = zero;
}

DensityExpr DensityExpr::number(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::number;
  n->value = value;
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::param;
  n->name = std::move(name);
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::var(Slot slot) {
  auto n = std::make_shared<Node>();
  n->op = Op::var;
  n->slot = slot;
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::neg(DensityExpr arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::neg;
  n->lhs = std::move(arg);
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::binary(Op op, DensityExpr lhs, DensityExpr rhs) {
  assert(op == Op::add || op == Op::sub || op == Op::mul || op == Op::div);
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::pow(DensityExpr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::pow;
  n->lhs = std::move(base);
  n->exponent = exponent;
  return DensityExpr(std::move(n));
}

DensityExpr DensityExpr::ln(DensityExpr arg) {
  auto n = std::make_shared<Node>();
  n->op = Op::ln;
  n->lhs = std::move(arg);
  return DensityExpr(std::move(n));
}

DensityExpr::Op DensityExpr::op() const noexcept { return node_->op; }
double DensityExpr::value() const { return node_->value; }
const std::string& DensityExpr::name() const { return node_->name; }
Slot DensityExpr::slot() const { return node_->slot; }
int DensityExpr::exponent() const { return node_->exponent; }
const DensityExpr& DensityExpr::lhs() const { return node_->lhs; }
const DensityExpr& DensityExpr::rhs() const { return node_->rhs; }

bool DensityExpr::is_number(double v) const noexcept {
  return node_->op == Op::number && node_->value == v;
}

bool DensityExpr::references(Slot s) const {
  switch (op()) {
    case Op::number:
    case Op::param:
      return false;
    case Op::var:
      return slot() == s;
    case Op::neg:
    case Op::pow:
    case Op::ln:
      return lhs().references(s);
    default:
      return lhs().references(s) || rhs().references(s);
  }
}

namespace {
void collect_params(const DensityExpr& e, std::set<std::string>& out) {
  using Op = DensityExpr::Op;
  switch (e.op()) {
    case Op::number:
    case Op::var:
      return;
    case Op::param:
      out.insert(e.name());
      return;
    case Op::neg:
    case Op::pow:
    case Op::ln:
      collect_params(e.lhs(), out);
      return;
    default:
      collect_params(e.lhs(), out);
      collect_params(e.rhs(), out);
  }
}
}  // namespace

std::set<std::string> DensityExpr::params() const {
  std::set<std::string> out;
  collect_params(*this, out);
  return out;
}

std::size_t DensityExpr::size() const {
  switch (op()) {
    case Op::number:
    case Op::param:
    case Op::var:
      return 1;
    case Op::neg:
    case Op::pow:
    case Op::ln:
      return 1 + lhs().size();
    default:
      return 1 + lhs().size() + rhs().size();
  }
}

bool operator==(const DensityExpr& a, const DensityExpr& b) {
  using Op = DensityExpr::Op;
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::number:
      return a.value() == b.value();
    case Op::param:
      return a.name() == b.name();
    case Op::var:
      return a.slot() == b.slot();
    case Op::neg:
    case Op::ln:
      return a.lhs() == b.lhs();
    case Op::pow:
      return a.exponent() == b.exponent() && a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// --- rendering --------------------------------------------------------------

namespace {

int precedence(DensityExpr::Op op) {
  using Op = DensityExpr::Op;
  switch (op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::neg:
      return 3;
    case Op::pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_literal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  assert(ec == std::errc());
  return std::string(buf, end);
}

void render(const DensityExpr& e, std::string& out);

void render_at_least(const DensityExpr& e, int min_prec, std::string& out) {
  if (precedence(e.op()) < min_prec) {
    out += '(';
    render(e, out);
    out += ')';
  } else {
    render(e, out);
  }
}

void render(const DensityExpr& e, std::string& out) {
  using Op = DensityExpr::Op;
  switch (e.op()) {
    case Op::number:
      if (e.value() < 0 || std::signbit(e.value())) {
        // Negative literals never come out of the parser; keep round trips
        // stable by rendering them as negations.
        out += "(-";
        out += format_literal(-e.value());
        out += ')';
      } else {
        out += format_literal(e.value());
      }
      return;
    case Op::param:
      out += e.name();
      return;
    case Op::var:
      out += slot_name(e.slot());
      return;
    case Op::neg:
      out += '-';
      render_at_least(e.lhs(), 3, out);
      return;
    case Op::ln:
      out += "ln(";
      render(e.lhs(), out);
      out += ')';
      return;
    case Op::pow:
      render_at_least(e.lhs(), 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::add:
    case Op::sub:
      render_at_least(e.lhs(), 1, out);
      out += e.op() == Op::add ? " + " : " - ";
      render_at_least(e.rhs(), 2, out);
      return;
    case Op::mul:
    case Op::div:
      render_at_least(e.lhs(), 2, out);
      out += e.op() == Op::mul ? '*' : '/';
      render_at_least(e.rhs(), 3, out);
      return;
  }
}

}  // namespace

std::string DensityExpr::str() const {
  std::string out;
  render(*this, out);
  return out;
}

// --- construction helpers with trivial folding ------------------------------

namespace {

using Op = DensityExpr::Op;

DensityExpr lit(double v) {
  return v < 0 ? DensityExpr::neg(DensityExpr::number(-v))
               : DensityExpr::number(v);
}

DensityExpr fold_neg(DensityExpr a) {
  if (a.is_number(0.0)) return a;
  return DensityExpr::neg(std::move(a));
}

DensityExpr fold_add(DensityExpr a, DensityExpr b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return b;
  return DensityExpr::binary(Op::add, std::move(a), std::move(b));
}

DensityExpr fold_sub(DensityExpr a, DensityExpr b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return fold_neg(std::move(b));
  return DensityExpr::binary(Op::sub, std::move(a), std::move(b));
}

DensityExpr fold_mul(DensityExpr a, DensityExpr b) {
  if (a.is_number(0.0) || b.is_number(0.0)) return DensityExpr::number(0.0);
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  return DensityExpr::binary(Op::mul, std::move(a), std::move(b));
}

DensityExpr fold_div(DensityExpr a, DensityExpr b) {
  if (a.is_number(0.0)) return DensityExpr::number(0.0);
  if (b.is_number(1.0)) return a;
  return DensityExpr::binary(Op::div, std::move(a), std::move(b));
}

DensityExpr fold_pow(DensityExpr base, int exponent) {
  if (exponent == 0) return DensityExpr::number(1.0);
  if (exponent == 1) return base;
  return DensityExpr::pow(std::move(base), exponent);
}

}  // namespace

DensityExpr operator+(DensityExpr a, DensityExpr b) {
  return DensityExpr::binary(Op::add, std::move(a), std::move(b));
}
DensityExpr operator-(DensityExpr a, DensityExpr b) {
  return DensityExpr::binary(Op::sub, std::move(a), std::move(b));
}
DensityExpr operator*(DensityExpr a, DensityExpr b) {
  return DensityExpr::binary(Op::mul, std::move(a), std::move(b));
}
DensityExpr operator/(DensityExpr a, DensityExpr b) {
  return DensityExpr::binary(Op::div, std::move(a), std::move(b));
}
DensityExpr operator-(DensityExpr a) { return DensityExpr::neg(std::move(a)); }

DensityExpr partial(const DensityExpr& e, Slot s) {
  switch (e.op()) {
    case Op::number:
    case Op::param:
      return DensityExpr::number(0.0);
    case Op::var:
      return DensityExpr::number(e.slot() == s ? 1.0 : 0.0);
    case Op::neg:
      return fold_neg(partial(e.lhs(), s));
    case Op::add:
      return fold_add(partial(e.lhs(), s), partial(e.rhs(), s));
    case Op::sub:
      return fold_sub(partial(e.lhs(), s), partial(e.rhs(), s));
    case Op::mul:
      return fold_add(fold_mul(partial(e.lhs(), s), e.rhs()),
                      fold_mul(e.lhs(), partial(e.rhs(), s)));
    case Op::div: {
      // (a/b)' = a'/b - a*b'/b^2
      DensityExpr da = partial(e.lhs(), s);
      DensityExpr db = partial(e.rhs(), s);
      return fold_sub(fold_div(da, e.rhs()),
                      fold_div(fold_mul(e.lhs(), db), fold_pow(e.rhs(), 2)));
    }
    case Op::pow: {
      DensityExpr db = partial(e.lhs(), s);
      if (db.is_number(0.0)) return db;
      const int k = e.exponent();
      return fold_mul(fold_mul(lit(k), fold_pow(e.lhs(), k - 1)), db);
    }
    case Op::ln:
      return fold_div(partial(e.lhs(), s), e.lhs());
  }
  throw std::logic_error("unhandled expression node");
}

namespace {

double ipow(double base, int k) {
  double r = 1.0;
  double b = base;
  unsigned u = k < 0 ? static_cast<unsigned>(-(k + 1)) + 1u
                     : static_cast<unsigned>(k);
  while (u) {
    if (u & 1u) r *= b;
    b *= b;
    u >>= 1;
  }
  return k < 0 ? 1.0 / r : r;
}

}  // namespace

DensityExpr substitute(const DensityExpr& e, const ParamBindings& bindings) {
  auto as_number = [](const DensityExpr& x, double& v) {
    if (x.op() == Op::number) {
      v = x.value();
      return true;
    }
    if (x.op() == Op::neg && x.lhs().op() == Op::number) {
      v = -x.lhs().value();
      return true;
    }
    return false;
  };
  switch (e.op()) {
    case Op::number:
    case Op::var:
      return e;
    case Op::param: {
      auto it = bindings.find(e.name());
      return it == bindings.end() ? e : lit(it->second);
    }
    case Op::neg: {
      DensityExpr a = substitute(e.lhs(), bindings);
      double v;
      if (as_number(a, v)) return lit(-v);
      return DensityExpr::neg(std::move(a));
    }
    case Op::ln:
      return DensityExpr::ln(substitute(e.lhs(), bindings));
    case Op::pow: {
      DensityExpr b = substitute(e.lhs(), bindings);
      double v;
      if (as_number(b, v) && !(v == 0.0 && e.exponent() < 0)) {
        return lit(ipow(v, e.exponent()));
      }
      return fold_pow(std::move(b), e.exponent());
    }
    default:
      break;
  }
  DensityExpr a = substitute(e.lhs(), bindings);
  DensityExpr b = substitute(e.rhs(), bindings);
  double va = 0.0;
  double vb = 0.0;
  const bool na = as_number(a, va);
  const bool nb = as_number(b, vb);
  switch (e.op()) {
    case Op::add:
      if (na && nb) return lit(va + vb);
      return fold_add(std::move(a), std::move(b));
    case Op::sub:
      if (na && nb) return lit(va - vb);
      return fold_sub(std::move(a), std::move(b));
    case Op::mul:
      if ((na && va == 0.0) || (nb && vb == 0.0)) return DensityExpr::number(0.0);
      if (na && nb) return lit(va * vb);
      return fold_mul(std::move(a), std::move(b));
    case Op::div:
      if (na && nb && vb != 0.0) return lit(va / vb);
      if (na && va == 0.0 && !(nb && vb == 0.0)) return DensityExpr::number(0.0);
      return DensityExpr::binary(Op::div, std::move(a), std::move(b));
    default:
      throw std::logic_error("unhandled expression node");
  }
}

}  // namespace nlqm
