#include "covfield/parser.hpp"

#include <cctype>
#include <vector>

#include "covfield/errors.hpp"

namespace covfield::symexpr {

namespace {

enum class Tok { Int, Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  size_t offset;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Int, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t j = i;
      while (j < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), i});
      i = j;
      continue;
    }
    if (std::string("+-*/^(),").find(ch) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, ch), i});
      ++i;
      continue;
    }
    throw spec_error("syntax error at offset " + std::to_string(i) +
                     ": unexpected character '" + std::string(1, ch) + "'");
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const ParseContext& ctx)
      : toks_(lex(text)), ctx_(ctx) {
    if (!ctx.chart) throw spec_error("parse_scalar: null chart");
  }

  Scalar run() {
    Scalar e = expr();
    if (cur().kind != Tok::End)
      fail("unexpected trailing input '" + cur().text + "'");
    return e;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw spec_error("syntax error at offset " + std::to_string(cur().offset) + ": " +
                     what);
  }

  bool accept_sym(const char* s) {
    if (cur().kind == Tok::Sym && cur().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_sym(const char* s) {
    if (!accept_sym(s)) fail(std::string("expected '") + s + "'");
  }

  std::string expect_ident() {
    if (cur().kind != Tok::Ident) fail("expected identifier");
    std::string t = cur().text;
    ++pos_;
    return t;
  }

  Scalar expr() {
    Scalar e = term();
    while (true) {
      if (accept_sym("+"))
        e = e + term();
      else if (accept_sym("-"))
        e = e - term();
      else
        return e;
    }
  }

  Scalar term() {
    Scalar e = factor();
    while (true) {
      if (accept_sym("*")) {
        e = e * factor();
      } else if (accept_sym("/")) {
        size_t at = cur().offset;
        Scalar d = factor();
        if (d.is_zero())
          throw spec_error("zero denominator at offset " + std::to_string(at));
        e = e / d;
      } else {
        return e;
      }
    }
  }

  Scalar factor() {
    Scalar a = atom();
    if (accept_sym("^")) {
      if (cur().kind != Tok::Int) fail("expected nonnegative integer exponent");
      mpz_class z(cur().text);
      if (!z.fits_sint_p()) fail("exponent too large");
      ++pos_;
      return a.pow(static_cast<int>(z.get_si()));
    }
    return a;
  }

  // Coordinate reference inside jet(...): an identifier or mom(i,lam).
  int coordref() {
    std::string name = expect_ident();
    if (name == "mom") return momentum();
    if (name == "pp") {
      int p = ctx_.chart->find_pp();
      if (p < 0) fail("chart has no homogeneous momentum");
      return p;
    }
    int p = ctx_.chart->find_name(name);
    if (p < 0) fail("unknown coordinate '" + name + "'");
    return p;
  }

  int base_index() {
    std::string name = expect_ident();
    int p = ctx_.chart->find_name(name);
    if (p < 0 || !ctx_.chart->is_base(p)) fail("expected a base coordinate, got '" + name + "'");
    return p;
  }

  int momentum() {
    expect_sym("(");
    std::string fiber = expect_ident();
    int fp = ctx_.chart->find_name(fiber);
    if (fp < 0 || ctx_.chart->coords[fp].role != CoordRole::Fiber)
      fail("expected a fiber coordinate, got '" + fiber + "'");
    expect_sym(",");
    int b = base_index();
    expect_sym(")");
    int p = ctx_.chart->find_momentum(fp, b);
    if (p < 0) fail("chart has no momentum mom(" + fiber + "," + ctx_.chart->coords[b].name + ")");
    return p;
  }

  Scalar atom() {
    if (accept_sym("-")) return -factor();
    if (accept_sym("(")) {
      Scalar e = expr();
      expect_sym(")");
      return e;
    }
    if (cur().kind == Tok::Int) {
      mpz_class z(cur().text);
      ++pos_;
      return Scalar::constant(ctx_.chart, Rat(z));
    }
    if (cur().kind != Tok::Ident) fail("expected expression");
    size_t at = cur().offset;
    std::string name = expect_ident();
    if (name == "sin" || name == "cos" || name == "exp") {
      KernelFn fn = name == "sin"   ? KernelFn::Sin
                    : name == "cos" ? KernelFn::Cos
                                    : KernelFn::Exp;
      expect_sym("(");
      Scalar arg = expr();
      expect_sym(")");
      return Scalar::kernel(fn, arg);
    }
    if (name == "mom") return Scalar::coordinate(ctx_.chart, momentum());
    if (name == "jet") {
      expect_sym("(");
      int target = coordref();
      expect_sym(",");
      int b = base_index();
      expect_sym(")");
      int p = ctx_.chart->find_jet(target, b);
      if (p < 0)
        fail("chart has no jet coordinate jet(" + ctx_.chart->coords[target].name + "," +
             ctx_.chart->coords[b].name + ")");
      return Scalar::coordinate(ctx_.chart, p);
    }
    if (name == "pp") {
      int p = ctx_.chart->find_pp();
      if (p < 0) fail("chart has no homogeneous momentum");
      return Scalar::coordinate(ctx_.chart, p);
    }
    if (name == "rho") {
      auto it = ctx_.named.find("rho");
      if (it == ctx_.named.end()) fail("'rho' is not defined in this context");
      if (!same_chart(it->second.chart(), ctx_.chart))
        return embed(it->second, ctx_.chart);
      return it->second;
    }
    int p = ctx_.chart->find_name(name);
    if (p < 0)
      throw spec_error("unknown identifier '" + name + "' at offset " +
                       std::to_string(at));
    return Scalar::coordinate(ctx_.chart, p);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  const ParseContext& ctx_;
};

}  // namespace

Scalar parse_scalar(const std::string& text, const ParseContext& ctx) {
  return Parser(text, ctx).run();
}

Scalar parse_scalar(const std::string& text, const ChartPtr& chart) {
  ParseContext ctx;
  ctx.chart = chart;
  return parse_scalar(text, ctx);
}

}  // namespace covfield::symexpr
