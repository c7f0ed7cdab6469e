#include "fdqrank/grouprel.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "fdqrank/errors.hpp"

namespace fdq {

namespace {

constexpr int kMaxExponent = 4096;

struct Token {
  std::string_view text;
  int column;  // 1-based
};

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

/// Splits one statement into whitespace-separated tokens. `offset` is the
/// 0-based column of the statement's first byte within its line.
std::vector<Token> tokenize(std::string_view stmt, int offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < stmt.size()) {
    while (i < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
    std::size_t start = i;
    while (i < stmt.size() && !std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
    if (i > start) out.push_back({stmt.substr(start, i - start), offset + static_cast<int>(start) + 1});
  }
  return out;
}

class PresentationParser {
 public:
  explicit PresentationParser(std::string_view source) : source_(source) {}

  Presentation parse(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

      std::size_t stmt_start = 0;
      while (stmt_start <= line.size()) {
        std::size_t semi = line.find(';', stmt_start);
        if (semi == std::string_view::npos) semi = line.size();
        auto tokens = tokenize(line.substr(stmt_start, semi - stmt_start), static_cast<int>(stmt_start));
        if (!tokens.empty()) statement(tokens, line_no);
        stmt_start = semi + 1;
      }
      if (eol == text.size()) break;
      pos = eol + 1;
    }
    if (!have_gens_) fail(line_no, 1, "missing 'gens' statement");
    if (!have_order_) fail(line_no, 1, "missing order annotation ('order infinite' or 'order finite <k>')");
    if (result_.name.empty()) result_.name = "unnamed";
    return std::move(result_);
  }

 private:
  [[noreturn]] void fail(int line, int column, const std::string& msg) const {
    throw ParseError(std::string(source_), line, column, msg);
  }

  void statement(const std::vector<Token>& t, int line) {
    std::string_view kw = t[0].text;
    if (kw == "group") {
      if (t.size() != 2) fail(line, t[0].column, "expected 'group <name>'");
      result_.name = std::string(t[1].text);
    } else if (kw == "gens") {
      if (have_gens_) fail(line, t[0].column, "duplicate 'gens' statement");
      if (t.size() < 2) fail(line, t[0].column, "'gens' needs at least one generator");
      for (std::size_t a = 1; a < t.size(); ++a) {
        if (!is_identifier(t[a].text)) fail(line, t[a].column, "invalid generator name '" + std::string(t[a].text) + "'");
        auto [it, inserted] = index_.emplace(std::string(t[a].text), static_cast<std::uint32_t>(a - 1));
        if (!inserted) fail(line, t[a].column, "duplicate generator '" + std::string(t[a].text) + "'");
        result_.generators.emplace_back(t[a].text);
      }
      have_gens_ = true;
    } else if (kw == "rel") {
      if (!have_gens_) fail(line, t[0].column, "'rel' before 'gens'");
      if (t.size() < 2) fail(line, t[0].column, "empty relator");
      std::vector<Letter> letters;
      for (std::size_t a = 1; a < t.size(); ++a) letter(t[a], line, letters);
      result_.relators.emplace_back(std::move(letters));
    } else if (kw == "order") {
      if (have_order_) fail(line, t[0].column, "duplicate 'order' statement");
      if (t.size() == 2 && t[1].text == "infinite") {
        result_.order.reset();
      } else if (t.size() == 3 && t[1].text == "finite") {
        std::uint64_t k = 0;
        auto [p, ec] = std::from_chars(t[2].text.data(), t[2].text.data() + t[2].text.size(), k);
        if (ec != std::errc() || p != t[2].text.data() + t[2].text.size() || k == 0)
          fail(line, t[2].column, "group order must be a positive integer");
        result_.order = k;
      } else {
        fail(line, t[0].column, "expected 'order infinite' or 'order finite <k>'");
      }
      have_order_ = true;
    } else {
      fail(line, t[0].column, "unknown statement '" + std::string(kw) + "'");
    }
  }

  void letter(const Token& tok, int line, std::vector<Letter>& out) const {
    std::string_view s = tok.text;
    std::string_view name = s;
    int exponent = 1;
    if (auto caret = s.find('^'); caret != std::string_view::npos) {
      name = s.substr(0, caret);
      std::string_view e = s.substr(caret + 1);
      auto [p, ec] = std::from_chars(e.data(), e.data() + e.size(), exponent);
      int ecol = tok.column + static_cast<int>(caret) + 1;
      if (e.empty() || ec != std::errc() || p != e.data() + e.size()) fail(line, ecol, "malformed exponent '" + std::string(e) + "'");
      if (exponent == 0) fail(line, ecol, "zero exponent");
      if (exponent > kMaxExponent || exponent < -kMaxExponent)
        fail(line, ecol, "exponent magnitude exceeds " + std::to_string(kMaxExponent));
    }
    auto it = index_.find(std::string(name));
    if (it == index_.end()) fail(line, tok.column, "unknown generator '" + std::string(name) + "'");
    int sign = exponent > 0 ? 1 : -1;
    for (int r = 0; r < exponent * sign; ++r) out.push_back({it->second, sign});
  }

  std::string_view source_;
  Presentation result_;
  std::map<std::string, std::uint32_t> index_;
  bool have_gens_ = false;
  bool have_order_ = false;
};

}  // namespace

GroupWord GroupWord::inverse() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back({it->generator, -it->exponent});
  return GroupWord(std::move(out));
}

GroupWord GroupWord::free_reduced() const {
  std::vector<Letter> out;
  for (const Letter& l : letters_) {
    if (!out.empty() && out.back().generator == l.generator && out.back().exponent == -l.exponent)
      out.pop_back();
    else
      out.push_back(l);
  }
  return GroupWord(std::move(out));
}

std::string GroupWord::to_string(const std::vector<std::string>& names) const {
  if (letters_.empty()) return "1";
  std::string out;
  for (std::size_t a = 0; a < letters_.size(); ++a) {
    if (a) out += ' ';
    out += names.at(letters_[a].generator);
    if (letters_[a].exponent < 0) out += "^-1";
  }
  return out;
}

Presentation parse_presentation(std::string_view text, std::string_view source) {
  return PresentationParser(source).parse(text);
}

Presentation load_presentation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read presentation file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Presentation p = parse_presentation(buf.str(), path.string());
  return p;
}

GeneratorSubstitution build_generators(const Presentation& p) {
  const std::size_t m = p.m();
  GeneratorSubstitution s;
  s.n = 2 * m;
  const auto half = GaussianRational::from_fractions(1, 2);
  const auto half_i = GaussianRational::from_fractions(0, 1, 1, 2);
  for (std::size_t j = 0; j < m; ++j) {
    NCPoly re = NCPoly::variable(s.n, static_cast<std::uint32_t>(j));
    NCPoly im = NCPoly::variable(s.n, static_cast<std::uint32_t>(m + j));
    s.forward.push_back(half * re - half_i * im);
    s.inverse.push_back(half * re + half_i * im);
  }
  return s;
}

NCPoly substitute_word(const GroupWord& w, const GeneratorSubstitution& subst, const ExpansionLimits& limits) {
  NCPoly acc = NCPoly::constant(subst.n, 1);
  for (const Letter& l : w.letters()) {
    const NCPoly& img = l.exponent > 0 ? subst.forward.at(l.generator) : subst.inverse.at(l.generator);
    acc = mul(acc, img, limits);
  }
  return acc;
}

RelationSystem build_relation_system(const Presentation& p, const ExpansionLimits& limits) {
  if (p.m() == 0) throw UsageError("presentation has no generators");
  RelationSystem rs;
  rs.m = p.m();
  rs.substitution = build_generators(p);
  rs.n = rs.substitution.n;
  const NCPoly four = NCPoly::constant(rs.n, 4);
  const auto two = GaussianRational(2);

  for (std::size_t j = 0; j < rs.m; ++j) {
    // 2g and 2g^{-1}: the unit relations are cleared of the factor 1/4.
    NCPoly g2 = two * rs.substitution.forward[j];
    NCPoly ginv2 = two * rs.substitution.inverse[j];
    rs.polys.push_back(mul(g2, ginv2, limits) - four);
    rs.kinds.push_back(RelationKind::unit_forward);
    rs.labels.push_back("unit " + p.generators[j] + " " + p.generators[j] + "^-1");
    rs.polys.push_back(mul(ginv2, g2, limits) - four);
    rs.kinds.push_back(RelationKind::unit_backward);
    rs.labels.push_back("unit " + p.generators[j] + "^-1 " + p.generators[j]);
  }

  const NCPoly one = NCPoly::constant(rs.n, 1);
  for (std::size_t r = 0; r < p.relators.size(); ++r) {
    NCPoly rel(rs.n);
    try {
      rel = substitute_word(p.relators[r], rs.substitution, limits);
    } catch (const ResourceError& e) {
      throw ResourceError("relator " + std::to_string(r + 1) + " (" + p.relators[r].to_string(p.generators) +
                          "): " + e.what());
    }
    rs.polys.push_back(rel - one);
    rs.kinds.push_back(RelationKind::relator);
    rs.labels.push_back("relator " + p.relators[r].to_string(p.generators));
  }
  rs.k = rs.polys.size();
  return rs;
}

Jacobian::Jacobian(std::size_t k, std::size_t n, std::vector<TensorPoly> entries)
    : k_(k), n_(n), entries_(std::move(entries)) {
  if (entries_.size() != k * n) throw UsageError("Jacobian: entry count does not match k*n");
}

Jacobian build_jacobian(const std::vector<NCPoly>& polys, std::size_t nvars) {
  std::vector<TensorPoly> entries;
  entries.reserve(polys.size() * nvars);
  for (const NCPoly& f : polys) {
    if (f.nvars() != nvars) throw UsageError("build_jacobian: variable count mismatch");
    for (std::size_t j = 0; j < nvars; ++j) entries.push_back(differentiate(f, static_cast<std::uint32_t>(j)));
  }
  return Jacobian(polys.size(), nvars, std::move(entries));
}

Jacobian build_jacobian(const RelationSystem& rs) { return build_jacobian(rs.polys, rs.n); }

std::string relations_text(const RelationSystem& rs) {
  std::ostringstream out;
  out << "n = " << rs.n << "\n";
  out << "k = " << rs.k << "\n";
  for (std::size_t i = 0; i < rs.k; ++i) {
    out << "# " << rs.labels[i] << "\n";
    out << "F" << i + 1 << " = " << rs.polys[i].to_string() << "\n";
  }
  return out.str();
}

std::string jacobian_text(const RelationSystem& rs, const Jacobian& jac) {
  std::ostringstream out;
  out << "n = " << jac.n() << "\n";
  out << "k = " << jac.k() << "\n";
  for (std::size_t i = 0; i < jac.k(); ++i) {
    if (i < rs.labels.size()) out << "# " << rs.labels[i] << "\n";
    for (std::size_t j = 0; j < jac.n(); ++j) {
      if (jac.at(i, j).is_zero()) continue;
      out << "d" << j + 1 << " F" << i + 1 << " = " << jac.at(i, j).to_string() << "\n";
    }
  }
  return out.str();
}

}  // namespace fdq
