#include "dcxlab/law_grammar.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dcxlab/error.hpp"

namespace dcx {
namespace {

struct Call;
using Value = std::variant<double, std::vector<double>, std::shared_ptr<Call>>;

struct Call {
  std::string name;
  std::vector<Value> args;
  std::map<std::string, Value> kwargs;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Value parse_all() {
    Value v = value();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a name");
    std::string s(text_.substr(start, pos_ - start));
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  double number() {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) fail("expected a decimal number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  Value value() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '[') {
      ++pos_;
      std::vector<double> list;
      if (!accept(']')) {
        do list.push_back(number());
        while (accept(','));
        expect(']');
      }
      return list;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      auto call = std::make_shared<Call>();
      call->name = ident();
      if (accept('(')) {
        if (!accept(')')) {
          do {
            skip_ws();
            const std::size_t save = pos_;
            if (std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
              std::string key = ident();
              if (accept('=')) {
                call->kwargs[key] = value();
                continue;
              }
              pos_ = save;
            }
            if (!call->kwargs.empty()) fail("positional argument after keyword argument");
            call->args.push_back(value());
          } while (accept(','));
          expect(')');
        }
      }
      return call;
    }
    return number();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

const Call& as_call(const Value& v, const char* what) {
  if (const auto* c = std::get_if<std::shared_ptr<Call>>(&v)) return **c;
  throw ParseError(std::string("expected ") + what);
}

double as_number(const Value& v, const std::string& ctx) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw ParseError(ctx + ": expected a number");
}

std::int64_t as_integer(const Value& v, const std::string& ctx) {
  const double d = as_number(v, ctx);
  if (d != std::floor(d) || std::abs(d) > 9e15) throw ParseError(ctx + ": expected an integer, got " + std::to_string(d));
  return static_cast<std::int64_t>(d);
}

const std::vector<double>& as_list(const Value& v, const std::string& ctx) {
  if (const auto* l = std::get_if<std::vector<double>>(&v)) return *l;
  throw ParseError(ctx + ": expected a list [..]");
}

void arity(const Call& c, std::size_t n) {
  if (c.args.size() != n || !c.kwargs.empty())
    throw ParseError(c.name + ": expected " + std::to_string(n) + " argument(s), got " + std::to_string(c.args.size()));
}

DiscreteLaw law_from(const Call& c) {
  const std::string& n = c.name;
  if (n == "poi" || n == "poisson") {
    arity(c, 1);
    return DiscreteLaw::poisson(as_number(c.args[0], n));
  }
  if (n == "bin" || n == "binomial") {
    arity(c, 2);
    return DiscreteLaw::binomial(as_integer(c.args[0], n), as_number(c.args[1], n));
  }
  if (n == "hgeo") {
    arity(c, 3);
    return DiscreteLaw::hypergeometric(as_integer(c.args[0], n), as_integer(c.args[1], n), as_integer(c.args[2], n));
  }
  if (n == "nbin") {
    arity(c, 2);
    return DiscreteLaw::neg_binomial(as_number(c.args[0], n), as_number(c.args[1], n));
  }
  if (n == "geo") {
    arity(c, 1);
    return DiscreteLaw::geometric(as_number(c.args[0], n));
  }
  if (n == "mixgeo") {
    arity(c, 2);
    return DiscreteLaw::geo_mixture(as_list(c.args[0], n), as_list(c.args[1], n));
  }
  if (n == "dirac") {
    arity(c, 1);
    return DiscreteLaw::dirac(as_integer(c.args[0], n));
  }
  if (n == "emp") {
    arity(c, 1);
    return DiscreteLaw::empirical(as_list(c.args[0], n));
  }
  if (n == "conv") {
    if (!c.kwargs.empty()) throw ParseError("conv: keyword arguments not allowed");
    std::vector<DiscreteLaw> parts;
    for (const auto& a : c.args) parts.push_back(law_from(as_call(a, "a law inside conv(...)")));
    return DiscreteLaw::convolution(parts);
  }
  throw ParseError("unknown law '" + n + "'");
}

TranslationSpec translation_from(const Value& v, double spacing) {
  const Call& c = as_call(v, "a translation kernel");
  if (c.name == "cell") {
    if (c.args.empty()) return UniformCell{spacing};
    arity(c, 1);
    return UniformCell{as_number(c.args[0], "cell")};
  }
  if (c.name == "ball") {
    arity(c, 1);
    return UniformBall{as_number(c.args[0], "ball")};
  }
  if (c.name == "gauss") {
    if (c.args.size() == 1 && c.kwargs.empty()) {
      const double s = as_number(c.args[0], "gauss");
      return Gaussian{s, 6.0 * s};
    }
    arity(c, 2);
    return Gaussian{as_number(c.args[0], "gauss"), as_number(c.args[1], "gauss")};
  }
  throw ParseError("unknown translation kernel '" + c.name + "'");
}

}  // namespace

DiscreteLaw parse_law(std::string_view text) {
  return law_from(as_call(Parser(text).parse_all(), "a law such as poi(1)"));
}

TranslationSpec parse_translation(std::string_view text) {
  return translation_from(Parser(text).parse_all(), 1.0);
}

GeneratorSpec parse_generator(std::string_view text) {
  const Value parsed = Parser(text).parse_all();
  const Call& c = as_call(parsed, "a generator such as poisson(1)");
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [k, v] : c.kwargs) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ParseError(c.name + ": unknown option '" + k + "'");
    }
  };
  if (c.name == "poisson" || c.name == "ppp") {
    arity(c, 1);
    const double intensity = as_number(c.args[0], c.name);
    if (!(intensity > 0.0) || !std::isfinite(intensity)) throw ParameterError(c.name + ": intensity must be > 0");
    return PoissonSpec{intensity};
  }
  if (c.name == "lattice") {
    if (c.args.size() != 1) throw ParseError("lattice: expected one replication law argument");
    check_keys({"spacing", "dim", "shift", "translation"});
    IntegerLattice lat;
    if (auto it = c.kwargs.find("spacing"); it != c.kwargs.end()) lat.spacing = as_number(it->second, "spacing");
    if (auto it = c.kwargs.find("dim"); it != c.kwargs.end()) {
      const auto d = as_integer(it->second, "dim");
      if (d < 0) throw ParseError("lattice: dim must be >= 0");
      lat.dim = static_cast<std::size_t>(d);
    }
    if (auto it = c.kwargs.find("shift"); it != c.kwargs.end()) lat.random_shift = as_integer(it->second, "shift") != 0;
    PerturbationSpec spec{lat, law_from(as_call(c.args[0], "a replication law")), UniformCell{lat.spacing}};
    if (auto it = c.kwargs.find("translation"); it != c.kwargs.end())
      spec.translation = translation_from(it->second, lat.spacing);
    spec.validate();
    return spec;
  }
  if (c.name == "cluster") {
    if (c.args.size() != 2) throw ParseError("cluster: expected (parent_intensity, law)");
    check_keys({"translation"});
    ClusterSpec spec{as_number(c.args[0], "cluster"), law_from(as_call(c.args[1], "a replication law")),
                     UniformBall{0.5}};
    if (!(spec.parent_intensity > 0.0)) throw ParameterError("cluster: parent intensity must be > 0");
    if (auto it = c.kwargs.find("translation"); it != c.kwargs.end())
      spec.translation = translation_from(it->second, 1.0);
    return spec;
  }
  throw ParseError("unknown generator '" + c.name + "'");
}

}  // namespace dcx
