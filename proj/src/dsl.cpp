#include "crn/dsl.hpp"

#include "crn/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace crn {
namespace {

enum class Tok { word, arrow, biarrow, plus, comma, colon, equals };

struct Token {
  Tok kind;
  std::string text;
  int column;  // 1-based
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool numeric_prefix(const std::string& word) {
  return !word.empty() && (std::isdigit(static_cast<unsigned char>(word[0])) ||
                           word[0] == '.' || word[0] == '-');
}

std::vector<Token> tokenize(std::string_view line, int line_no) {
  std::vector<Token> tokens;
  std::size_t p = 0;
  while (p < line.size()) {
    const char c = line[p];
    const int column = static_cast<int>(p) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++p;
    } else if (line.substr(p, 3) == "<->") {
      tokens.push_back({Tok::biarrow, "<->", column});
      p += 3;
    } else if (line.substr(p, 2) == "->") {
      tokens.push_back({Tok::arrow, "->", column});
      p += 2;
    } else if (c == '+') {
      tokens.push_back({Tok::plus, "+", column});
      ++p;
    } else if (c == ',') {
      tokens.push_back({Tok::comma, ",", column});
      ++p;
    } else if (c == ':') {
      tokens.push_back({Tok::colon, ":", column});
      ++p;
    } else if (c == '=') {
      tokens.push_back({Tok::equals, "=", column});
      ++p;
    } else if (word_char(c) || (c == '-' && p + 1 < line.size() &&
                                (std::isdigit(static_cast<unsigned char>(line[p + 1])) ||
                                 line[p + 1] == '.'))) {
      std::string word(1, c);
      ++p;
      while (p < line.size()) {
        const char n = line[p];
        const bool exponent_sign = (n == '+' || n == '-') && numeric_prefix(word) &&
                                   (word.back() == 'e' || word.back() == 'E');
        if (!word_char(n) && !exponent_sign) break;
        word.push_back(n);
        ++p;
      }
      tokens.push_back({Tok::word, std::move(word), column});
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_no, column);
    }
  }
  return tokens;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::optional<double> to_real(const std::string& s) {
  double value = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long> to_integer(const std::string& s) {
  long value = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

class LineParser {
 public:
  LineParser(std::vector<Token> tokens, int line_no, int line_length)
      : tokens_(std::move(tokens)), line_(line_no), end_column_(line_length + 1) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const Token* peek() const { return done() ? nullptr : &tokens_[pos_]; }
  int column() const { return done() ? end_column_ : tokens_[pos_].column; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column());
  }

  const Token& expect(Tok kind, const char* what) {
    if (done() || tokens_[pos_].kind != kind) fail(std::string("expected ") + what);
    return tokens_[pos_++];
  }

  bool accept(Tok kind) {
    if (!done() && tokens_[pos_].kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  double real(const char* what) {
    const int col = column();
    const Token& t = expect(Tok::word, what);
    auto value = to_real(t.text);
    if (!value) throw ParseError(std::string("expected ") + what, line_, col);
    return *value;
  }

  void keyword(const char* word) {
    const int col = column();
    const Token& t = expect(Tok::word, word);
    if (t.text != word) {
      throw ParseError(std::string("expected '") + word + "'", line_, col);
    }
  }

  int line() const { return line_; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int line_;
  int end_column_;
};

struct Builder {
  std::vector<std::string> species;
  std::vector<Reaction> reactions;
  std::vector<ThetaSpec> thetas;
  std::vector<bool> theta_seen;
  std::set<std::pair<std::vector<int>, std::vector<int>>> pairs;

  int index_of(const std::string& name) const {
    for (std::size_t i = 0; i < species.size(); ++i) {
      if (species[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  IntVector complex(LineParser& in) {
    IntVector y = IntVector::Zero(static_cast<int>(species.size()));
    const Token* first = in.peek();
    if (first && first->kind == Tok::word && first->text == "0") {
      in.expect(Tok::word, "complex");
      return y;
    }
    do {
      const int col = in.column();
      const Token& t = in.expect(Tok::word, "species or coefficient");
      long coeff = 1;
      std::string name = t.text;
      if (!is_identifier(t.text)) {
        auto n = to_integer(t.text);
        if (!n || *n < 1) {
          throw ParseError("invalid stoichiometric coefficient '" + t.text + "'",
                           in.line(), col);
        }
        if (*n > std::numeric_limits<int>::max()) {
          throw ParseError("stoichiometric coefficient too large", in.line(), col);
        }
        coeff = *n;
        const int name_col = in.column();
        name = in.expect(Tok::word, "species name").text;
        if (!is_identifier(name)) {
          throw ParseError("invalid species name '" + name + "'", in.line(), name_col);
        }
        if (index_of(name) < 0) {
          throw ParseError("unknown species '" + name + "'", in.line(), name_col);
        }
      } else if (index_of(name) < 0) {
        throw ParseError("unknown species '" + name + "'", in.line(), col);
      }
      const int i = index_of(name);
      if (static_cast<long>(y[i]) + coeff > std::numeric_limits<int>::max()) {
        throw ParseError("stoichiometric coefficient too large", in.line(), col);
      }
      y[i] += static_cast<int>(coeff);
    } while (in.accept(Tok::plus));
    return y;
  }

  void add_reaction(const IntVector& source, const IntVector& product, double rate,
                    int line, int column) {
    if (!(rate > 0.0)) throw ParseError("rate constant must be positive", line, column);
    if (source == product) throw ParseError("self-loop reaction", line, column);
    std::vector<int> s(source.data(), source.data() + source.size());
    std::vector<int> p(product.data(), product.data() + product.size());
    if (!pairs.emplace(s, p).second) throw ParseError("duplicate reaction", line, column);
    reactions.push_back({source, product, rate});
  }

  void reaction_line(LineParser& in) {
    const int start = in.column();
    IntVector lhs = complex(in);
    const Token* arrow = in.peek();
    if (!arrow || (arrow->kind != Tok::arrow && arrow->kind != Tok::biarrow)) {
      in.fail("expected '->' or '<->'");
    }
    const bool reversible = arrow->kind == Tok::biarrow;
    in.expect(arrow->kind, "arrow");
    IntVector rhs = complex(in);
    in.expect(Tok::comma, "',' before rate");
    const int rate_col = in.column();
    const double forward = in.real("rate constant");
    if (!reversible) {
      if (!in.done()) in.fail("unexpected text after rate constant");
      add_reaction(lhs, rhs, forward, in.line(), lhs == rhs ? start : rate_col);
      return;
    }
    in.expect(Tok::comma, "',' before reverse rate");
    const int back_col = in.column();
    const double backward = in.real("reverse rate constant");
    if (!in.done()) in.fail("unexpected text after reverse rate constant");
    add_reaction(lhs, rhs, forward, in.line(), lhs == rhs ? start : rate_col);
    add_reaction(rhs, lhs, backward, in.line(), back_col);
  }

  void theta_line(LineParser& in) {
    in.keyword("theta");
    const int name_col = in.column();
    const std::string name = in.expect(Tok::word, "species name").text;
    const int i = index_of(name);
    if (i < 0) throw ParseError("unknown species '" + name + "'", in.line(), name_col);
    if (theta_seen[i]) {
      throw ParseError("duplicate theta line for '" + name + "'", in.line(), name_col);
    }
    in.keyword("power");
    ThetaSpec theta;
    in.keyword("A");
    in.expect(Tok::equals, "'='");
    const int a_col = in.column();
    theta.tail_A = in.real("value of A");
    if (!(theta.tail_A > 0.0)) throw ParseError("A must be positive", in.line(), a_col);
    in.keyword("d");
    in.expect(Tok::equals, "'='");
    const int d_col = in.column();
    theta.tail_d = in.real("value of d");
    if (theta.tail_d == 0.0) throw ParseError("d must be nonzero", in.line(), d_col);
    if (!in.done()) {
      in.keyword("overrides");
      while (!in.done()) {
        const int x_col = in.column();
        const Token& xt = in.expect(Tok::word, "override argument");
        auto x = to_integer(xt.text);
        if (!x) throw ParseError("override argument must be an integer", in.line(), x_col);
        if (*x <= 0) {
          throw ParseError("theta override at x <= 0 (theta vanishes there)", in.line(),
                           x_col);
        }
        in.expect(Tok::equals, "'='");
        const int v_col = in.column();
        const double v = in.real("override value");
        if (v < 0.0) throw ParseError("theta override must be >= 0", in.line(), v_col);
        if (!theta.overrides.emplace(*x, v).second) {
          throw ParseError("duplicate override", in.line(), x_col);
        }
      }
    }
    thetas[i] = theta;
    theta_seen[i] = true;
  }
};

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

ParsedNetwork parse_network(std::string_view text) {
  Builder b;
  bool have_species = false;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw =
        text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = strip_comment(raw);
    auto tokens = tokenize(line, line_no);
    if (tokens.empty()) continue;
    LineParser in(std::move(tokens), line_no, static_cast<int>(line.size()));

    if (!have_species) {
      in.keyword("species");
      in.expect(Tok::colon, "':' after 'species'");
      if (in.done()) in.fail("species list is empty");
      while (!in.done()) {
        const int col = in.column();
        const std::string name = in.expect(Tok::word, "species name").text;
        if (!is_identifier(name) || name == "theta" || name == "species") {
          throw ParseError("invalid species name '" + name + "'", line_no, col);
        }
        if (b.index_of(name) >= 0) {
          throw ParseError("duplicate species '" + name + "'", line_no, col);
        }
        b.species.push_back(name);
      }
      b.thetas.assign(b.species.size(), ThetaSpec::mass_action());
      b.theta_seen.assign(b.species.size(), false);
      have_species = true;
      continue;
    }

    const Token* first = in.peek();
    if (first->kind == Tok::word && first->text == "species") {
      in.fail("only one species line is allowed");
    }
    if (first->kind == Tok::word && first->text == "theta") {
      b.theta_line(in);
    } else {
      b.reaction_line(in);
    }
  }
  if (!have_species) throw ParseError("missing 'species:' line", line_no, 1);
  if (b.reactions.empty()) throw ParseError("network has no reactions", line_no, 1);

  return {ReactionNetwork(std::move(b.species), std::move(b.reactions)),
          KineticsSpec{std::move(b.thetas)}};
}

ParsedNetwork load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open network file '" + path + "'", 0, 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str());
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

namespace {

std::string complex_text(const ReactionNetwork& net, const IntVector& y) {
  std::string out;
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (y[i] != 1) out += std::to_string(y[i]) + " ";
    out += net.species()[i];
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string serialize_network(const ReactionNetwork& net, const KineticsSpec& kin) {
  std::string out = "species:";
  for (const auto& name : net.species()) out += " " + name;
  out += "\n";
  for (const Reaction& r : net.reactions()) {
    out += complex_text(net, r.source) + " -> " + complex_text(net, r.product) + " , " +
           format_real(r.rate) + "\n";
  }
  for (int i = 0; i < kin.num_species(); ++i) {
    const ThetaSpec& theta = kin.thetas[i];
    if (theta.is_mass_action()) continue;
    out += "theta " + net.species()[i] + " power A=" + format_real(theta.tail_A) +
           " d=" + format_real(theta.tail_d);
    if (!theta.overrides.empty()) {
      out += " overrides";
      for (const auto& [x, v] : theta.overrides) {
        out += " " + std::to_string(x) + "=" + format_real(v);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace crn
