#include <cctype>
#include <charconv>
#include <limits>
#include <string>

#include "nlqm/dsl.hpp"
#include "nlqm/error.hpp"

namespace nlqm {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  DensityExpr run() {
    skip_space();
    if (at_end()) fail("empty expression");
    DensityExpr e = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, pos_);
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(at_end() ? std::string("expected '") + c + "' before end of input"
                    : std::string("expected '") + c + "'");
    }
  }

  DensityExpr expr() {
    DensityExpr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = DensityExpr::binary(DensityExpr::Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = DensityExpr::binary(DensityExpr::Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  DensityExpr term() {
    DensityExpr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = DensityExpr::binary(DensityExpr::Op::mul, lhs, factor());
      } else if (accept('/')) {
        lhs = DensityExpr::binary(DensityExpr::Op::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  DensityExpr factor() {
    if (accept('-')) return DensityExpr::neg(factor());
    return power();
  }

  DensityExpr power() {
    DensityExpr base = atom();
    if (!accept('^')) return base;
    long long k = exponent_chain();
    if (k > std::numeric_limits<int>::max() ||
        k < std::numeric_limits<int>::min()) {
      fail("exponent out of range");
    }
    return DensityExpr::pow(base, static_cast<int>(k));
  }

  // integer ('^' integer)*, evaluated right to left.
  long long exponent_chain() {
    long long k = integer();
    if (!accept('^')) return k;
    const std::size_t at = pos_;
    long long rest = exponent_chain();
    if (rest < 0) {
      pos_ = at;
      fail("negative exponent in a power tower");
    }
    long long r = 1;
    for (long long i = 0; i < rest; ++i) {
      r *= k;
      if (r > std::numeric_limits<int>::max() ||
          r < std::numeric_limits<int>::min()) {
        pos_ = at;
        fail("exponent out of range");
      }
    }
    return r;
  }

  long long integer() {
    skip_space();
    const std::size_t start = pos_;
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      ++pos_;
    }
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      fail("exponent must be an integer literal");
    }
    long long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > (1LL << 40)) {
        pos_ = start;
        fail("exponent out of range");
      }
      ++pos_;
    }
    if (peek() == '.' || peek() == 'e' || peek() == 'E') {
      pos_ = start;
      fail("exponent must be an integer literal");
    }
    return negative ? -v : v;
  }

  DensityExpr atom() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      DensityExpr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) ||
                           peek() == '_')) {
        ++pos_;
      }
      const std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "ln") {
        expect('(');
        DensityExpr arg = expr();
        expect(')');
        return DensityExpr::ln(arg);
      }
      if (auto slot = slot_from_name(ident)) return DensityExpr::var(*slot);
      return DensityExpr::param(std::string(ident));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  DensityExpr number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[end]))) {
        ++end;
      }
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (e < text_.size() && std::isdigit(static_cast<unsigned char>(text_[e]))) {
        end = e;
        digits();
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + end;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail("malformed number");
    pos_ = end;
    return DensityExpr::number(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

DensityExpr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace nlqm
