#include "lbpcert/text_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace lbpcert {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

struct Token {
  std::string text;
  int line = 0;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
        ++i;
      if (i >= line.size() || line[i] == '#') break;
      std::size_t j = i;
      while (j < line.size() &&
             !std::isspace(static_cast<unsigned char>(line[j])) &&
             line[j] != '#')
        ++j;
      tokens.push_back({line.substr(i, j - i), lineno});
      i = j;
    }
  }
  return tokens;
}

class Reader {
 public:
  explicit Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }

  const Token& next(const char* what) {
    if (done())
      throw ParseError(std::string("unexpected end of input, expected ") +
                       what);
    return tokens_[pos_++];
  }

  long long read_int(const char* what, long long min_value = 0) {
    const Token& t = next(what);
    long long v = 0;
    const auto res =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       what + ", got '" + t.text + "'");
    if (v < min_value)
      throw ParseError("line " + std::to_string(t.line) + ": " + what +
                       " must be >= " + std::to_string(min_value) + ", got '" +
                       t.text + "'");
    return v;
  }

  double read_value(const char* what) {
    const Token& t = next(what);
    double v = 0.0;
    const auto res =
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
      throw ParseError("line " + std::to_string(t.line) + ": expected " +
                       what + ", got '" + t.text + "'");
    if (!std::isfinite(v) || v <= 0.0)
      throw ParseError("line " + std::to_string(t.line) + ": " + what +
                       " must be strictly positive and finite, got '" +
                       t.text + "'");
    return v;
  }

  const Token& last() const { return tokens_[pos_ - 1]; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

FactorGraph parse_factor_graph(std::istream& in) {
  Reader r(tokenize(in));

  const long long num_factors = r.read_int("number of factor blocks");
  std::vector<Factor> factors;
  factors.reserve(static_cast<std::size_t>(num_factors));
  // cardinality per variable id as encountered; -1 = unseen
  std::vector<long long> cards;

  for (long long fi = 0; fi < num_factors; ++fi) {
    const long long arity = r.read_int("factor arity", 1);
    Factor f;
    f.vars.reserve(static_cast<std::size_t>(arity));
    for (long long m = 0; m < arity; ++m) {
      const long long v = r.read_int("variable id");
      if (v > std::numeric_limits<int>::max())
        throw ParseError("variable id out of range");
      for (int prev : f.vars)
        if (prev == static_cast<int>(v))
          throw ParseError("line " + std::to_string(r.last().line) +
                           ": factor block " + std::to_string(fi) +
                           " lists variable " + std::to_string(v) + " twice");
      f.vars.push_back(static_cast<int>(v));
      if (static_cast<std::size_t>(v) >= cards.size())
        cards.resize(static_cast<std::size_t>(v) + 1, -1);
    }
    std::size_t expected = 1;
    for (long long m = 0; m < arity; ++m) {
      const long long c = r.read_int("cardinality", 2);
      const auto v = static_cast<std::size_t>(f.vars[static_cast<std::size_t>(m)]);
      if (cards[v] != -1 && cards[v] != c)
        throw ParseError("line " + std::to_string(r.last().line) +
                         ": variable " + std::to_string(f.vars[static_cast<std::size_t>(m)]) +
                         " was declared with cardinality " +
                         std::to_string(cards[v]) + ", now " +
                         std::to_string(c));
      cards[v] = c;
      expected *= static_cast<std::size_t>(c);
    }
    const long long num_entries = r.read_int("number of table entries");
    if (static_cast<std::size_t>(num_entries) != expected)
      throw ParseError("line " + std::to_string(r.last().line) +
                       ": factor block " + std::to_string(fi) + " declares " +
                       std::to_string(num_entries) +
                       " entries but the cardinalities require " +
                       std::to_string(expected));
    f.table.assign(expected, 0.0);
    std::vector<bool> seen(expected, false);
    for (long long e = 0; e < num_entries; ++e) {
      const long long idx = r.read_int("table index");
      if (static_cast<std::size_t>(idx) >= expected)
        throw ParseError("line " + std::to_string(r.last().line) +
                         ": table index " + std::to_string(idx) +
                         " out of range [0, " + std::to_string(expected) +
                         ")");
      if (seen[static_cast<std::size_t>(idx)])
        throw ParseError("line " + std::to_string(r.last().line) +
                         ": duplicate table index " + std::to_string(idx));
      seen[static_cast<std::size_t>(idx)] = true;
      f.table[static_cast<std::size_t>(idx)] = r.read_value("table value");
    }
    factors.push_back(std::move(f));
  }
  if (!r.done())
    throw ParseError("line " + std::to_string(r.next("end of input").line) +
                     ": unexpected trailing token '" + r.last().text + "'");

  const int num_vars = static_cast<int>(cards.size());
  std::vector<int> cardinalities(cards.size());
  for (std::size_t v = 0; v < cards.size(); ++v) {
    if (cards[v] == -1)
      throw ParseError("variable ids are not contiguous: variable " +
                       std::to_string(v) +
                       " never appears but higher ids do");
    cardinalities[v] = static_cast<int>(cards[v]);
  }

  try {
    return make_graph(num_vars, std::move(cardinalities), std::move(factors));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

FactorGraph parse_factor_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_factor_graph(in);
}

void serialize_factor_graph(const FactorGraph& g, std::ostream& out) {
  out << g.factors.size() << "\n";
  for (const Factor& f : g.factors) {
    out << f.vars.size() << "\n";
    for (std::size_t m = 0; m < f.vars.size(); ++m)
      out << (m ? " " : "") << f.vars[m];
    out << "\n";
    for (std::size_t m = 0; m < f.vars.size(); ++m)
      out << (m ? " " : "")
          << g.cardinalities[static_cast<std::size_t>(f.vars[m])];
    out << "\n";
    out << f.table.size() << "\n";
    for (std::size_t k = 0; k < f.table.size(); ++k)
      out << k << " " << format_double(f.table[k]) << "\n";
  }
}

std::string serialize_factor_graph(const FactorGraph& g) {
  std::ostringstream out;
  serialize_factor_graph(g, out);
  return out.str();
}

}  // namespace lbpcert
