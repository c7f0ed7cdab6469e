#include "fdqrank/repkit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "fdqrank/errors.hpp"
#include "fdqrank/prng.hpp"

namespace fdq {

namespace {

Complex root_of_unity(std::size_t r, std::size_t order) {
  if (r == 0) return {1.0, 0.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(order));
}

void check_permutation(std::span<const std::uint32_t> images, std::size_t j) {
  std::vector<bool> seen(images.size(), false);
  for (std::uint32_t v : images) {
    if (v >= images.size())
      throw LoadError("generator " + std::to_string(j + 1) + ": image " + std::to_string(v) + " out of range");
    if (seen[v])
      throw LoadError("generator " + std::to_string(j + 1) + ": not a permutation (repeated image " +
                      std::to_string(v) + ")");
    seen[v] = true;
  }
}

std::vector<std::uint32_t> shift_images(std::size_t n) {
  std::vector<std::uint32_t> s(n);
  for (std::size_t v = 0; v < n; ++v) s[v] = static_cast<std::uint32_t>((v + 1) % n);
  return s;
}

JointSpectrum cyclic_spectrum(std::size_t n) {
  JointSpectrum js{n, 1, {}};
  for (std::size_t p = 0; p < n; ++p) js.values.push_back(root_of_unity(p, n));
  return js;
}

std::vector<std::size_t> cycle_lengths(std::span<const std::uint32_t> images) {
  std::vector<bool> seen(images.size(), false);
  std::vector<std::size_t> lengths;
  for (std::size_t start = 0; start < images.size(); ++start) {
    if (seen[start]) continue;
    std::size_t len = 0;
    for (std::size_t v = start; !seen[v]; v = images[v]) {
      seen[v] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

std::size_t parse_size(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw UsageError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

JointSpectrum permutation_spectrum(std::span<const std::uint32_t> images) {
  JointSpectrum js{images.size(), 1, {}};
  for (std::size_t len : cycle_lengths(images))
    for (std::size_t r = 0; r < len; ++r) js.values.push_back(root_of_unity(r, len));
  return js;
}

// Representation

Representation Representation::from_permutations(std::vector<std::vector<std::uint32_t>> images,
                                                  std::string provenance, bool exact) {
  if (images.empty()) throw UsageError("representation needs at least one generator");
  Representation r;
  r.dim_ = images.front().size();
  if (r.dim_ == 0) throw UsageError("representation dimension must be positive");
  for (std::size_t j = 0; j < images.size(); ++j) {
    if (images[j].size() != r.dim_) throw LoadError("generator " + std::to_string(j + 1) + ": wrong dimension");
    check_permutation(images[j], j);
  }
  r.m_ = images.size();
  r.kind_ = RepKind::permutation;
  r.exact_ = exact;
  r.provenance_ = std::move(provenance);
  r.perms_ = std::move(images);
  return r;
}

Representation Representation::from_dense(std::vector<Matrix> mats, std::string provenance, bool exact,
                                          UnitarityTolerance tol) {
  if (mats.empty()) throw UsageError("representation needs at least one generator");
  Representation r;
  r.dim_ = static_cast<std::size_t>(mats.front().rows());
  if (r.dim_ == 0) throw UsageError("representation dimension must be positive");
  const Matrix id = Matrix::Identity(static_cast<Eigen::Index>(r.dim_), static_cast<Eigen::Index>(r.dim_));
  for (std::size_t j = 0; j < mats.size(); ++j) {
    const Matrix& u = mats[j];
    if (static_cast<std::size_t>(u.rows()) != r.dim_ || static_cast<std::size_t>(u.cols()) != r.dim_)
      throw LoadError("generator " + std::to_string(j + 1) + ": wrong dimension");
    double err = (u.adjoint() * u - id).cwiseAbs().maxCoeff();
    if (!(err <= tol.max_entry_error)) {
      std::ostringstream msg;
      msg << "generator " << j + 1 << ": not unitary (max |U*U - I| = " << err << ")";
      throw LoadError(msg.str());
    }
  }
  r.m_ = mats.size();
  r.kind_ = RepKind::dense;
  r.exact_ = exact;
  r.provenance_ = std::move(provenance);
  r.dense_ = std::move(mats);
  return r;
}

Matrix Representation::generator(std::size_t j) const {
  if (kind_ == RepKind::dense) return dense_.at(j);
  const auto& s = perms_.at(j);
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix u = Matrix::Zero(d, d);
  for (std::size_t v = 0; v < dim_; ++v) u(s[v], static_cast<Eigen::Index>(v)) = 1.0;
  return u;
}

void Representation::set_joint_spectrum(JointSpectrum js) {
  if (js.dim != dim_ || js.m != m_ || js.values.size() != dim_ * m_)
    throw UsageError("joint spectrum does not match representation shape");
  joint_ = std::move(js);
}

std::vector<Matrix> Representation::variable_values() const {
  std::vector<Matrix> x(2 * m_);
  const Complex i{0.0, 1.0};
  for (std::size_t j = 0; j < m_; ++j) {
    Matrix u = generator(j);
    Matrix ua = u.adjoint();
    x[j] = u + ua;
    x[m_ + j] = i * (u - ua);
  }
  return x;
}

bool operator==(const Representation& a, const Representation& b) {
  if (a.dim_ != b.dim_ || a.m_ != b.m_ || a.kind_ != b.kind_) return false;
  if (a.kind_ == RepKind::permutation) return a.perms_ == b.perms_;
  for (std::size_t j = 0; j < a.m_; ++j)
    if (a.dense_[j] != b.dense_[j]) return false;
  return true;
}

// Families

Representation cyclic_shift(std::size_t n) {
  if (n == 0) throw UsageError("cyclic: size must be >= 1");
  auto r = Representation::from_permutations({shift_images(n)}, "cyclic:" + std::to_string(n), true);
  r.set_joint_spectrum(cyclic_spectrum(n));
  return r;
}

Representation regular_cyclic(std::size_t k) {
  if (k == 0) throw UsageError("regular-cyclic: order must be >= 1");
  auto r = Representation::from_permutations({shift_images(k)}, "regular-cyclic:" + std::to_string(k), true);
  r.set_joint_spectrum(cyclic_spectrum(k));
  return r;
}

Representation torus(std::size_t n) {
  if (n == 0) throw UsageError("torus: size must be >= 1");
  const std::size_t d = n * n;
  std::vector<std::uint32_t> a(d), b(d);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      a[x * n + y] = static_cast<std::uint32_t>(((x + 1) % n) * n + y);  // shift (x) id
      b[x * n + y] = static_cast<std::uint32_t>(x * n + (y + 1) % n);    // id (x) shift
    }
  }
  auto r = Representation::from_permutations({a, b}, "torus:" + std::to_string(n), true);
  JointSpectrum js{d, 2, {}};
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      js.values.push_back(root_of_unity(p, n));
      js.values.push_back(root_of_unity(q, n));
    }
  r.set_joint_spectrum(std::move(js));
  return r;
}

Representation random_permutations(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n == 0) throw UsageError("randperm: size must be >= 1");
  if (m == 0) throw UsageError("randperm: generator count must be >= 1");
  std::vector<std::vector<std::uint32_t>> images;
  for (std::size_t j = 0; j < m; ++j) {
    CounterRng rng(seed, j);
    images.push_back(random_permutation(n, rng));
  }
  return Representation::from_permutations(std::move(images),
                                           "randperm:" + std::to_string(n) + ":" + std::to_string(seed), false);
}

// File format

Representation parse_representation(std::string_view text, std::string_view source, UnitarityTolerance tol) {
  // Collect non-empty, comment-stripped lines with their numbers.
  std::vector<std::pair<int, std::vector<std::string>>> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream ls(line);
      std::vector<std::string> toks;
      for (std::string t; ls >> t;) toks.push_back(t);
      if (!toks.empty()) lines.emplace_back(no, std::move(toks));
    }
  }
  const std::string src(source);
  auto fail = [&](int line, const std::string& msg) -> LoadError {
    return LoadError(src + ":" + std::to_string(line) + ": " + msg);
  };
  if (lines.empty()) throw LoadError(src + ": empty representation file");
  const auto& header = lines.front().second;
  if (header.size() != 4 || header[0] != "rep" || (header[3] != "perm" && header[3] != "dense"))
    throw fail(lines.front().first, "expected header 'rep <D> <m> perm|dense'");
  std::size_t d = 0, m = 0;
  try {
    d = parse_size(header[1], "dimension");
    m = parse_size(header[2], "generator count");
  } catch (const UsageError& e) {
    throw fail(lines.front().first, e.what());
  }
  if (d == 0 || m == 0) throw fail(lines.front().first, "dimension and generator count must be positive");
  const bool perm = header[3] == "perm";
  const std::string prov = "file:" + src;

  if (perm) {
    if (lines.size() != 1 + m) throw LoadError(src + ": expected " + std::to_string(m) + " permutation lines");
    std::vector<std::vector<std::uint32_t>> images;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& [no, toks] = lines[1 + j];
      if (toks.size() != d) throw fail(no, "expected " + std::to_string(d) + " images");
      std::vector<std::uint32_t> img;
      for (const auto& t : toks) {
        try {
          img.push_back(static_cast<std::uint32_t>(parse_size(t, "image")));
        } catch (const UsageError& e) {
          throw fail(no, e.what());
        }
      }
      images.push_back(std::move(img));
    }
    return Representation::from_permutations(std::move(images), prov, false);
  }

  if (lines.size() != 1 + m * d) throw LoadError(src + ": expected " + std::to_string(m * d) + " matrix rows");
  std::vector<Matrix> mats;
  for (std::size_t j = 0; j < m; ++j) {
    Matrix u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r) {
      const auto& [no, toks] = lines[1 + j * d + r];
      if (toks.size() != d) throw fail(no, "expected " + std::to_string(d) + " 're,im' entries");
      for (std::size_t c = 0; c < d; ++c) {
        const std::string& t = toks[c];
        auto comma = t.find(',');
        double re = 0, im = 0;
        bool ok = comma != std::string::npos;
        if (ok) {
          auto r1 = std::from_chars(t.data(), t.data() + comma, re);
          auto r2 = std::from_chars(t.data() + comma + 1, t.data() + t.size(), im);
          ok = r1.ec == std::errc() && r1.ptr == t.data() + comma && r2.ec == std::errc() &&
               r2.ptr == t.data() + t.size();
        }
        if (!ok) throw fail(no, "malformed entry '" + t + "'");
        u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(re, im);
      }
    }
    mats.push_back(std::move(u));
  }
  return Representation::from_dense(std::move(mats), prov, false, tol);
}

Representation load_representation(const std::filesystem::path& path, UnitarityTolerance tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read representation file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_representation(buf.str(), path.string(), tol);
}

std::string representation_text(const Representation& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "rep " << rep.dim() << ' ' << rep.m() << ' ' << (rep.kind() == RepKind::permutation ? "perm" : "dense")
      << '\n';
  for (std::size_t j = 0; j < rep.m(); ++j) {
    if (rep.kind() == RepKind::permutation) {
      const auto& s = rep.permutations()[j];
      for (std::size_t v = 0; v < s.size(); ++v) out << (v ? " " : "") << s[v];
      out << '\n';
    } else {
      Matrix u = rep.generator(j);
      for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c)
          out << (c ? " " : "") << u(r, c).real() << ',' << u(r, c).imag();
        out << '\n';
      }
    }
  }
  return out.str();
}

// Descriptors

std::string FamilySpec::descriptor() const {
  if (family == "file") return "file:" + path;
  std::string d = family;
  if (size) d += ":" + std::to_string(*size);
  if (family == "randperm" && seed) d += (size ? ":" : "::") + std::to_string(*seed);
  return d;
}

FamilySpec parse_family(std::string_view descriptor) {
  FamilySpec spec;
  auto colon = descriptor.find(':');
  spec.family = std::string(descriptor.substr(0, colon));
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : descriptor.substr(colon + 1);
  if (spec.family == "file") {
    if (rest.empty()) throw UsageError("file descriptor needs a path: 'file:PATH'");
    spec.path = std::string(rest);
    return spec;
  }
  if (spec.family != "cyclic" && spec.family != "torus" && spec.family != "regular-cyclic" &&
      spec.family != "randperm")
    throw UsageError("unknown representation family '" + spec.family +
                     "' (expected cyclic, torus, regular-cyclic, randperm, file)");
  if (colon == std::string_view::npos) return spec;
  std::string_view size_part = rest;
  if (spec.family == "randperm") {
    auto c2 = rest.find(':');
    if (c2 != std::string_view::npos) {
      size_part = rest.substr(0, c2);
      spec.seed = parse_size(rest.substr(c2 + 1), "seed");
    }
  }
  if (!size_part.empty()) {
    spec.size = parse_size(size_part, "size");
    if (*spec.size == 0) throw UsageError("representation size must be >= 1");
  }
  return spec;
}

Representation make_representation(const FamilySpec& spec, std::size_t m) {
  if (spec.family == "file") return load_representation(spec.path);
  if (!spec.size) throw UsageError("representation '" + spec.family + "' needs a size");
  const std::size_t n = *spec.size;
  if (spec.family == "cyclic") return cyclic_shift(n);
  if (spec.family == "torus") return torus(n);
  if (spec.family == "regular-cyclic") return regular_cyclic(n);
  if (spec.family == "randperm") return random_permutations(n, m, spec.seed.value_or(0));
  throw UsageError("unknown representation family '" + spec.family + "'");
}

// Defects

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

std::vector<double> relator_defects(const Representation& rep, const Presentation& p) {
  if (rep.m() != p.m())
    throw UsageError("representation has " + std::to_string(rep.m()) + " generators, presentation has " +
                     std::to_string(p.m()));
  std::vector<double> out;
  const std::size_t d = rep.dim();
  for (const GroupWord& w : p.relators) {
    if (rep.kind() == RepKind::permutation) {
      // Compose permutations exactly; ||P - I|| is read off the cycle lengths.
      std::vector<std::uint32_t> acc(d);
      for (std::size_t v = 0; v < d; ++v) acc[v] = static_cast<std::uint32_t>(v);
      // Matrix product M_1 M_2 ... M_r maps e_v to e_{s_1(s_2(...s_r(v)))}.
      for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) {
        const auto& s = rep.permutations()[it->generator];
        if (it->exponent > 0) {
          for (auto& v : acc) v = s[v];
        } else {
          std::vector<std::uint32_t> inv(d);
          for (std::size_t v = 0; v < d; ++v) inv[s[v]] = static_cast<std::uint32_t>(v);
          for (auto& v : acc) v = inv[v];
        }
      }
      double defect = 0.0;
      for (std::size_t len : cycle_lengths(acc)) {
        if (len < 2) continue;
        defect = std::max(defect, 2.0 * std::sin(std::numbers::pi * static_cast<double>(len / 2) /
                                                 static_cast<double>(len)));
      }
      out.push_back(defect);
    } else {
      const auto dd = static_cast<Eigen::Index>(d);
      Matrix acc = Matrix::Identity(dd, dd);
      for (const Letter& l : w.letters()) {
        Matrix u = rep.generator(l.generator);
        acc = l.exponent > 0 ? Matrix(acc * u) : Matrix(acc * u.adjoint());
      }
      out.push_back(operator_norm(acc - Matrix::Identity(dd, dd)));
    }
  }
  return out;
}

// Evaluation

MonomialEvaluator::MonomialEvaluator(std::span<const Matrix> values)
    : values_(values.begin(), values.end()), dim_(values.empty() ? 0 : static_cast<std::size_t>(values[0].rows())) {
  if (values_.empty()) throw UsageError("evaluation needs at least one variable value");
}

const Matrix& MonomialEvaluator::operator()(const Monomial& w) {
  if (auto it = cache_.find(w); it != cache_.end()) return it->second;
  Matrix value;
  if (w.is_unit()) {
    value = Matrix::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  } else {
    auto vars = w.vars();
    if (vars.back() >= values_.size())
      throw UsageError("evaluation: variable t" + std::to_string(vars.back() + 1) + " has no value");
    const Matrix& prefix = (*this)(w.slice(0, vars.size() - 1));
    value = prefix * values_[vars.back()];
  }
  return cache_.emplace(w, std::move(value)).first->second;
}

Matrix evaluate_poly(const NCPoly& p, std::span<const Matrix> values) {
  if (p.nvars() != values.size())
    throw UsageError("evaluate_poly: polynomial has " + std::to_string(p.nvars()) + " variables, got " +
                     std::to_string(values.size()) + " values");
  MonomialEvaluator eval(values);
  const auto d = values[0].rows();
  Matrix out = Matrix::Zero(d, d);
  for (const auto& [w, c] : p.terms()) out += c.to_complex() * eval(w);
  return out;
}

Matrix evaluate_poly(const NCPoly& p, const Representation& rep) {
  if (p.nvars() != rep.nvars())
    throw UsageError("evaluate_poly: polynomial has " + std::to_string(p.nvars()) +
                     " variables, representation supplies " + std::to_string(rep.nvars()));
  auto x = rep.variable_values();
  return evaluate_poly(p, x);
}

Matrix TensorOperator::apply(const Matrix& t) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix out = Matrix::Zero(d, d);
  for (const Term& term : terms_) out.noalias() += term.coeff * (term.left * t * term.right);
  return out;
}

Matrix TensorOperator::materialize(Flattening f) const {
  const auto d2 = static_cast<Eigen::Index>(dim_ * dim_);
  Matrix out = Matrix::Zero(d2, d2);
  for (const Term& term : terms_) {
    if (f == Flattening::column_major)
      out += term.coeff * Matrix(Eigen::kroneckerProduct(term.right.transpose(), term.left));
    else
      out += term.coeff * Matrix(Eigen::kroneckerProduct(term.left, term.right.transpose()));
  }
  return out;
}

TensorOperator evaluate_tensor(const TensorPoly& tp, MonomialEvaluator& eval, std::size_t dim) {
  std::vector<TensorOperator::Term> terms;
  terms.reserve(tp.terms().size());
  for (const auto& [key, c] : tp.terms()) terms.push_back({c.to_complex(), eval(key.first), eval(key.second)});
  return TensorOperator(dim, std::move(terms));
}

TensorOperator evaluate_tensor(const TensorPoly& tp, std::span<const Matrix> values) {
  if (tp.nvars() != values.size())
    throw UsageError("evaluate_tensor: tensor has " + std::to_string(tp.nvars()) + " variables, got " +
                     std::to_string(values.size()) + " values");
  MonomialEvaluator eval(values);
  return evaluate_tensor(tp, eval, static_cast<std::size_t>(values[0].rows()));
}

TensorOperator evaluate_tensor(const TensorPoly& tp, const Representation& rep) {
  if (tp.nvars() != rep.nvars())
    throw UsageError("evaluate_tensor: tensor has " + std::to_string(tp.nvars()) +
                     " variables, representation supplies " + std::to_string(rep.nvars()));
  auto x = rep.variable_values();
  return evaluate_tensor(tp, x);
}

Matrix flatten(const Matrix& t, Flattening f) {
  Matrix src = f == Flattening::column_major ? t : Matrix(t.transpose());
  return Eigen::Map<const Matrix>(src.data(), src.size(), 1);
}

Matrix unflatten(const Matrix& v, std::size_t dim, Flattening f) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix t = Eigen::Map<const Matrix>(v.data(), d, d);
  return f == Flattening::column_major ? t : Matrix(t.transpose());
}

}  // namespace fdq
