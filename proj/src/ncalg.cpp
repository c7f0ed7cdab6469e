#include "fdqrank/ncalg.hpp"

#include <algorithm>

#include "fdqrank/errors.hpp"

namespace fdq {

namespace {

std::string rational_text(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

void check_same_vars(std::size_t a, std::size_t b, const char* op) {
  if (a != b)
    throw UsageError(std::string(op) + ": variable count mismatch (" + std::to_string(a) +
                     " vs " + std::to_string(b) + ")");
}

void check_limits(std::size_t degree, std::size_t terms, const ExpansionLimits& limits) {
  if (degree > limits.max_degree)
    throw ResourceError("polynomial degree " + std::to_string(degree) + " exceeds cap " +
                        std::to_string(limits.max_degree));
  if (terms > limits.max_terms)
    throw ResourceError("polynomial term count exceeds cap " + std::to_string(limits.max_terms));
}

}  // namespace

// GaussianRational

GaussianRational::GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::from_fractions(long re_num, long re_den, long im_num, long im_den) {
  if (re_den == 0 || im_den == 0) throw UsageError("GaussianRational: zero denominator");
  return {mpq_class(mpz_class(re_num), mpz_class(re_den)), mpq_class(mpz_class(im_num), mpz_class(im_den))};
}

std::string GaussianRational::to_string() const {
  std::string out = rational_text(re_);
  out += sgn(im_) < 0 ? "-" : "+";
  out += rational_text(abs(im_));
  out += "*i";
  return out;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw UsageError("GaussianRational: division by zero");
  mpq_class norm = o.re_ * o.re_ + o.im_ * o.im_;
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / norm;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / norm;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

// Monomial

std::uint32_t Monomial::max_var() const {
  return vars_.empty() ? 0 : *std::max_element(vars_.begin(), vars_.end());
}

Monomial Monomial::reversed() const { return Monomial(std::vector<std::uint32_t>(vars_.rbegin(), vars_.rend())); }

Monomial Monomial::slice(std::size_t begin, std::size_t end) const {
  return Monomial(std::vector<std::uint32_t>(vars_.begin() + static_cast<std::ptrdiff_t>(begin),
                                             vars_.begin() + static_cast<std::ptrdiff_t>(end)));
}

std::string Monomial::to_string() const {
  if (vars_.empty()) return "1";
  std::string out;
  for (std::size_t a = 0; a < vars_.size(); ++a) {
    if (a) out += '*';
    out += 't' + std::to_string(vars_[a] + 1);
  }
  return out;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  std::vector<std::uint32_t> v;
  v.reserve(a.vars_.size() + b.vars_.size());
  v.insert(v.end(), a.vars_.begin(), a.vars_.end());
  v.insert(v.end(), b.vars_.begin(), b.vars_.end());
  return Monomial(std::move(v));
}

// NCPoly

NCPoly::NCPoly(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw UsageError("NCPoly: nvars must be positive");
}

NCPoly NCPoly::constant(std::size_t nvars, const GaussianRational& c) {
  NCPoly p(nvars);
  p.add_term(Monomial{}, c);
  return p;
}

NCPoly NCPoly::variable(std::size_t nvars, std::uint32_t j) {
  if (j >= nvars)
    throw UsageError("NCPoly::variable: index " + std::to_string(j + 1) + " out of range 1.." +
                     std::to_string(nvars));
  return monomial(nvars, Monomial{j});
}

NCPoly NCPoly::monomial(std::size_t nvars, Monomial w, const GaussianRational& c) {
  NCPoly p(nvars);
  if (!w.is_unit() && w.max_var() >= nvars)
    throw UsageError("NCPoly::monomial: variable out of range");
  p.add_term(w, c);
  return p;
}

std::size_t NCPoly::degree() const {
  // Terms are ordered by degree first.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

GaussianRational NCPoly::coefficient(const Monomial& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? GaussianRational{} : it->second;
}

void NCPoly::add_term(const Monomial& w, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

NCPoly NCPoly::involution() const {
  NCPoly out(nvars_);
  for (const auto& [w, c] : terms_) out.terms_.emplace(w.reversed(), c.conj());
  return out;
}

std::string NCPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += '(' + c.to_string() + ')';
    if (!w.is_unit()) out += '*' + w.to_string();
  }
  return out;
}

NCPoly& NCPoly::operator+=(const NCPoly& o) {
  check_same_vars(nvars_, o.nvars_, "add");
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& o) {
  check_same_vars(nvars_, o.nvars_, "sub");
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

NCPoly operator*(const NCPoly& a, const NCPoly& b) { return mul(a, b); }

NCPoly operator*(const GaussianRational& c, const NCPoly& p) { return scale(p, c); }

NCPoly add(const NCPoly& p, const NCPoly& q) { return p + q; }

NCPoly mul(const NCPoly& p, const NCPoly& q, const ExpansionLimits& limits) {
  check_same_vars(p.nvars(), q.nvars(), "mul");
  NCPoly out(p.nvars());
  if (p.is_zero() || q.is_zero()) return out;
  check_limits(p.degree() + q.degree(), 0, limits);
  for (const auto& [wa, ca] : p.terms()) {
    for (const auto& [wb, cb] : q.terms()) {
      out.add_term(wa * wb, ca * cb);
    }
    check_limits(0, out.terms().size(), limits);
  }
  return out;
}

NCPoly scale(const NCPoly& p, const GaussianRational& c) {
  NCPoly out(p.nvars());
  if (c.is_zero()) return out;
  for (const auto& [w, a] : p.terms()) out.add_term(w, a * c);
  return out;
}

// TensorPoly

bool TensorKeyLess::operator()(const std::pair<Monomial, Monomial>& a,
                               const std::pair<Monomial, Monomial>& b) const {
  std::size_t da = a.first.degree() + a.second.degree();
  std::size_t db = b.first.degree() + b.second.degree();
  if (da != db) return da < db;
  if (a.first < b.first) return true;
  if (b.first < a.first) return false;
  return a.second < b.second;
}

TensorPoly::TensorPoly(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw UsageError("TensorPoly: nvars must be positive");
}

TensorPoly TensorPoly::unit(std::size_t nvars) {
  TensorPoly t(nvars);
  t.add_term(Monomial{}, Monomial{}, 1);
  return t;
}

TensorPoly TensorPoly::outer(const NCPoly& a, const NCPoly& b, const ExpansionLimits& limits) {
  check_same_vars(a.nvars(), b.nvars(), "outer");
  TensorPoly t(a.nvars());
  check_limits(0, a.terms().size() * b.terms().size(), limits);
  for (const auto& [wa, ca] : a.terms())
    for (const auto& [wb, cb] : b.terms()) t.add_term(wa, wb, ca * cb);
  return t;
}

void TensorPoly::add_term(const Monomial& left, const Monomial& right, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(Key{left, right}, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TensorPoly TensorPoly::flip_conjugate() const {
  TensorPoly out(nvars_);
  for (const auto& [key, c] : terms_) out.add_term(key.second.reversed(), key.first.reversed(), c.conj());
  return out;
}

std::string TensorPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += '(' + c.to_string() + ")*[" + key.first.to_string() + " | " + key.second.to_string() + ']';
  }
  return out;
}

TensorPoly& TensorPoly::operator+=(const TensorPoly& o) {
  check_same_vars(nvars_, o.nvars_, "tensor add");
  for (const auto& [key, c] : o.terms_) add_term(key.first, key.second, c);
  return *this;
}

TensorPoly operator*(const GaussianRational& c, const TensorPoly& t) {
  TensorPoly out(t.nvars());
  if (c.is_zero()) return out;
  for (const auto& [key, a] : t.terms()) out.add_term(key.first, key.second, a * c);
  return out;
}

TensorPoly operator*(const TensorPoly& x, const TensorPoly& y) { return multiply(x, y); }

TensorPoly multiply(const TensorPoly& x, const TensorPoly& y, const ExpansionLimits& limits) {
  check_same_vars(x.nvars(), y.nvars(), "tensor mul");
  TensorPoly out(x.nvars());
  for (const auto& [kx, cx] : x.terms()) {
    for (const auto& [ky, cy] : y.terms()) {
      Monomial left = kx.first * ky.first;
      Monomial right = kx.second * ky.second;
      check_limits(std::max(left.degree(), right.degree()), 0, limits);
      out.add_term(left, right, cx * cy);
    }
    check_limits(0, out.terms().size(), limits);
  }
  return out;
}

TensorPoly differentiate(const NCPoly& p, std::uint32_t j) {
  if (j >= p.nvars())
    throw UsageError("differentiate: variable index " + std::to_string(j + 1) + " out of range 1.." +
                     std::to_string(p.nvars()));
  TensorPoly out(p.nvars());
  for (const auto& [w, c] : p.terms()) {
    auto vars = w.vars();
    for (std::size_t a = 0; a < vars.size(); ++a) {
      if (vars[a] != j) continue;
      out.add_term(w.slice(0, a), w.slice(a + 1, vars.size()), c);
    }
  }
  return out;
}

NCPoly contract(const TensorPoly& tp, const NCPoly& x, const ExpansionLimits& limits) {
  check_same_vars(tp.nvars(), x.nvars(), "contract");
  NCPoly out(x.nvars());
  for (const auto& [key, c] : tp.terms()) {
    for (const auto& [w, cx] : x.terms()) {
      Monomial m = key.first * w * key.second;
      check_limits(m.degree(), 0, limits);
      out.add_term(m, c * cx);
    }
    check_limits(0, out.terms().size(), limits);
  }
  return out;
}

}  // namespace fdq
