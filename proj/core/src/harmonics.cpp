#include "gsf/harmonics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>

#include "gsf/error.hpp"

namespace gsf {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr std::size_t kExactColumnLimit = 500;
constexpr double kSvdCutoff = 1e-10;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

void generate(int n, int k, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = k;
    out.push_back(cur);
    return;
  }
  for (int a = k; a >= 0; --a) {
    cur[pos] = a;
    generate(n, k - a, pos + 1, cur, out);
  }
}

long long binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Laplacian of each degree-k monomial expressed over the degree-(k-2) basis.
template <class T>
std::vector<std::vector<T>> laplacian_matrix(const std::vector<MultiIndex>& cols,
                                             const std::vector<MultiIndex>& rows) {
  std::map<MultiIndex, std::size_t> row_of;
  for (std::size_t i = 0; i < rows.size(); ++i) row_of[rows[i]] = i;
  std::vector<std::vector<T>> m(rows.size(), std::vector<T>(cols.size(), T(0)));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < cols[j].size(); ++i) {
      const int a = cols[j][i];
      if (a < 2) continue;
      MultiIndex b = cols[j];
      b[i] -= 2;
      m[row_of.at(b)][j] += T(a * (a - 1));
    }
  }
  return m;
}

std::vector<std::vector<double>> exact_null_space(const std::vector<MultiIndex>& cols,
                                                  const std::vector<MultiIndex>& rows) {
  auto m = laplacian_matrix<Rational>(cols, rows);
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < nc && r < nr; ++c) {
    std::size_t piv = r;
    while (piv < nr && m[piv][c] == 0) ++piv;
    if (piv == nr) continue;
    std::swap(m[piv], m[r]);
    const Rational inv = Rational(1) / m[r][c];
    for (std::size_t j = c; j < nc; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < nr; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < nc; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(nc, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<double>> basis;
  for (std::size_t f = 0; f < nc; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(nc, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) v[pivot_cols[i]] = -m[i][f];
    Rational big = 0;
    for (const Rational& x : v) {
      const Rational ax = abs(x);
      if (ax > big) big = ax;
    }
    std::vector<double> out(nc);
    for (std::size_t j = 0; j < nc; ++j) out[j] = static_cast<double>(v[j] / big);
    basis.push_back(std::move(out));
  }
  return basis;
}

std::vector<std::vector<double>> svd_null_space(const std::vector<MultiIndex>& cols,
                                                const std::vector<MultiIndex>& rows) {
  const auto m = laplacian_matrix<double>(cols, rows);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) a(i, j) = m[i][j];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kSvdCutoff * std::max(1.0, smax)) ++rank;
  }
  std::vector<std::vector<double>> basis;
  const Eigen::MatrixXd& v = svd.matrixV();
  for (Eigen::Index c = rank; c < v.cols(); ++c) {
    const double big = v.col(c).cwiseAbs().maxCoeff();
    std::vector<double> out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) out[j] = v(static_cast<Eigen::Index>(j), c) / big;
    basis.push_back(std::move(out));
  }
  return basis;
}

}  // namespace

Polynomial::Polynomial(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("polynomial dimension out of range");
}

Polynomial Polynomial::constant(double c, int n) {
  Polynomial p(n);
  p.add_term(MultiIndex(static_cast<std::size_t>(n), 0), c);
  return p;
}

Polynomial Polynomial::monomial(const MultiIndex& a, double c) {
  Polynomial p(static_cast<int>(a.size()));
  p.add_term(a, c);
  return p;
}

void Polynomial::add_term(const MultiIndex& a, double c) {
  if (static_cast<int>(a.size()) != n_) throw DimensionMismatch("multi-index length differs from dimension");
  for (int e : a) {
    if (e < 0) throw InvalidArgument("negative exponent in polynomial term");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(a, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [a, c] : terms_) {
    int s = 0;
    for (int e : a) s += e;
    d = std::max(d, s);
  }
  return d;
}

bool Polynomial::is_homogeneous(int k) const {
  for (const auto& [a, c] : terms_) {
    int s = 0;
    for (int e : a) s += e;
    if (s != k) return false;
  }
  return true;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::operator()(Point x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("polynomial evaluated at wrong dimension");
  double s = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < n_; ++i) t *= ipow(x[i], a[i]);
    s += t;
  }
  return s;
}

Dual2 Polynomial::eval_dual(Point x) const {
  if (static_cast<int>(x.size()) != n_) throw DimensionMismatch("polynomial evaluated at wrong dimension");
  Dual2 d;
  d.n = n_;
  std::array<double, kMaxDim> pw{};
  for (const auto& [a, c] : terms_) {
    for (int i = 0; i < n_; ++i) pw[i] = ipow(x[i], a[i]);
    double v = c;
    for (int i = 0; i < n_; ++i) v *= pw[i];
    d.value += v;
    for (int i = 0; i < n_; ++i) {
      if (a[i] == 0) continue;
      double rest = c;
      for (int j = 0; j < n_; ++j) {
        if (j != i) rest *= pw[j];
      }
      d.grad[i] += rest * a[i] * ipow(x[i], a[i] - 1);
      if (a[i] >= 2) d.hess_diag[i] += rest * a[i] * (a[i] - 1) * ipow(x[i], a[i] - 2);
    }
  }
  return d;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(n_);
  for (const auto& [a, c] : terms_) {
    if (a[i] == 0) continue;
    MultiIndex b = a;
    b[i] -= 1;
    out.add_term(b, c * a[i]);
  }
  return out;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(n_);
  for (const auto& [a, c] : terms_) {
    for (int i = 0; i < n_; ++i) {
      if (a[i] < 2) continue;
      MultiIndex b = a;
      b[i] -= 2;
      out.add_term(b, c * a[i] * (a[i] - 1));
    }
  }
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (n_ != other.n_) throw DimensionMismatch("product of polynomials in different dimensions");
  Polynomial out(n_);
  for (const auto& [a, c] : terms_) {
    for (const auto& [b, d] : other.terms_) {
      MultiIndex s(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] + b[i];
      out.add_term(s, c * d);
    }
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (n_ != other.n_) throw DimensionMismatch("sum of polynomials in different dimensions");
  Polynomial out = *this;
  for (const auto& [b, d] : other.terms_) out.add_term(b, d);
  return out;
}

Polynomial Polynomial::scaled(double c) const {
  Polynomial out(n_);
  for (const auto& [a, d] : terms_) out.add_term(a, c * d);
  return out;
}

Expr to_expr(const Polynomial& p) {
  const int n = p.dim();
  Expr sum;
  for (const auto& [a, c] : p.terms()) {
    Expr term = Expr::constant(c, n);
    for (int i = 0; i < n; ++i) {
      if (a[i] == 0) continue;
      Expr x = Expr::coordinate(i, n);
      term = term * (a[i] == 1 ? x : Expr::pow(x, Expr::constant(a[i], n)));
    }
    sum = sum.empty() ? term : sum + term;
  }
  return sum.empty() ? Expr::constant(0.0, n) : sum;
}

std::vector<MultiIndex> monomials(int n, int k) {
  if (n < 1) throw InvalidArgument("dimension must be at least 1");
  if (k < 0) throw InvalidArgument("degree must be non-negative");
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(n), 0);
  generate(n, k, 0, cur, out);
  return out;
}

long long harmonic_dimension(int n, int k) {
  if (n < 1 || k < 0) throw InvalidArgument("harmonic_dimension needs n >= 1 and k >= 0");
  return binomial(n + k - 1, n - 1) - binomial(n + k - 3, n - 1);
}

std::vector<HarmonicPolynomial> harmonic_basis(int n, int k) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("dimension out of range");
  if (k < 0) throw InvalidArgument("degree must be non-negative");
  const auto cols = monomials(n, k);
  std::vector<HarmonicPolynomial> out;
  if (k < 2) {
    for (const MultiIndex& a : cols) out.push_back({n, k, Polynomial::monomial(a), true});
    return out;
  }
  const auto rows = monomials(n, k - 2);
  const bool exact = cols.size() <= kExactColumnLimit;
  const auto vectors = exact ? exact_null_space(cols, rows) : svd_null_space(cols, rows);
  for (const auto& v : vectors) {
    Polynomial p(n);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (v[j] != 0.0) p.add_term(cols[j], v[j]);
    }
    out.push_back({n, k, std::move(p), exact});
  }
  return out;
}

std::function<double(Point)> w_function(const HarmonicPolynomial& poly, const VectorField& field) {
  if (dimension(field) != poly.n) throw DimensionMismatch("polynomial and field dimensions differ");
  if (const auto* f = std::get_if<RadialPowerField>(&field)) {
    const double coeff = -2.0 * f->alpha * poly.k;
    const double p = f->p;
    return [coeff, p](Point x) {
      if (coeff == 0.0 || p == 0.0) return coeff;
      const double r = norm(x);
      if (r == 0.0) {
        if (p < 0.0) return 0.0;
        throw SingularPoint("W is singular at x = 0");
      }
      return coeff * std::pow(r, -p);
    };
  }
  return [poly, field](Point x) {
    const Dual2 d = poly.poly.eval_dual(x);
    if (d.value == 0.0) throw ZeroDivision("W is undefined where P vanishes");
    const Vec v = eval_field(field, x);
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += d.grad[i] * v[i];
    return -2.0 * dot / d.value;
  };
}

std::vector<SpectrumEntry> oscillator_spectrum(int n, double alpha, int kmax) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("dimension out of range");
  if (!(alpha > 0.0)) throw InvalidArgument("oscillator coupling must be positive");
  if (kmax < 0) throw InvalidArgument("kmax must be non-negative");
  std::vector<SpectrumEntry> out;
  for (int k = 0; k <= kmax; ++k) {
    const long long deg = harmonic_dimension(n, k);
    if (deg == 0) continue;
    std::ostringstream os;
    os.precision(17);
    os << "P_" << k << "(x) exp(-" << alpha << " |x|^2 / 2)";
    out.push_back({k, alpha * (n + 2 * k), deg, alpha, os.str()});
  }
  return out;
}

double coulomb_rate(int n, double alpha, int k) { return alpha * (n - 1) / (n - 1 + 2.0 * k); }

std::vector<SpectrumEntry> coulomb_spectrum(int n, double alpha, int kmax) {
  if (n < 2 || n > kMaxDim) throw InvalidArgument("Coulomb spectrum needs 2 <= n <= 8");
  if (!(alpha > 0.0)) throw InvalidArgument("Coulomb coupling must be positive");
  if (kmax < 0) throw InvalidArgument("kmax must be non-negative");
  std::vector<SpectrumEntry> out;
  for (int k = 0; k <= kmax; ++k) {
    const double a = coulomb_rate(n, alpha, k);
    std::ostringstream os;
    os.precision(17);
    os << "P_" << k << "(x) exp(-" << a << " |x|)";
    out.push_back({k, -a * a, harmonic_dimension(n, k), a, os.str()});
  }
  return out;
}

}  // namespace gsf
