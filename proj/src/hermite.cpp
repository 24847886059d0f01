#include "noiselab/hermite.hpp"

#include <cmath>
#include <stdexcept>

#include "noiselab/normal.hpp"

namespace noiselab {

namespace {

// Physicists' Gauss-Hermite nodes/weights (weight e^{-x^2}) by Newton
// iteration on the orthonormal recurrence; stable for orders well beyond
// what the spectral checks here need.
void gauss_hermite_physicists(int n, std::vector<double>& x,
                              std::vector<double>& w) {
  constexpr double kEps = 1e-14;
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  double z = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    for (int it = 0; it < 100; ++it) {
      double p1 = kPiQuarterInv;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < kEps) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

double hermite_eval(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite_eval: n >= 0");
  if (n == 0) return 1.0;
  double hm = 1.0;  // H_0
  double h = x;     // H_1
  for (int k = 1; k < n; ++k) {
    const double next = x * h - k * hm;
    hm = h;
    h = next;
  }
  return h;
}

GaussHermiteRule::GaussHermiteRule(int order) {
  if (order < 1) throw std::invalid_argument("GaussHermiteRule: order >= 1");
  std::vector<double> xp, wp;
  gauss_hermite_physicists(order, xp, wp);
  nodes.resize(order);
  weights.resize(order);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  for (int i = 0; i < order; ++i) {
    nodes[i] = std::sqrt(2.0) * xp[i];
    weights[i] = wp[i] * inv_sqrt_pi;
  }
}

double GaussHermiteRule::integrate(
    const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

double gauss_hermite_inner(const std::function<double(double)>& f,
                           const std::function<double(double)>& g, int order) {
  GaussHermiteRule rule(order);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    s += rule.weights[i] * f(rule.nodes[i]) * g(rule.nodes[i]);
  }
  return s;
}

int total_degree(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) {
    if (a < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    s += a;
  }
  return s;
}

double multi_index_factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (int a : alpha) {
    for (int k = 2; k <= a; ++k) f *= k;
  }
  return f;
}

double hermite_eval_multi(const MultiIndex& alpha, std::span<const double> x) {
  if (alpha.size() != x.size()) {
    throw std::invalid_argument("hermite_eval_multi: dimension mismatch");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    p *= hermite_eval(alpha[i], x[i]);
  }
  return p;
}

double HermiteExpansion::coefficient(const MultiIndex& alpha) const {
  auto it = coeffs.find(alpha);
  return it == coeffs.end() ? 0.0 : it->second;
}

double HermiteExpansion::evaluate(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [alpha, a] : coeffs) s += a * hermite_eval_multi(alpha, x);
  return s;
}

HermiteExpansion semigroup_apply(const HermiteExpansion& e, double t) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: t >= 0");
  HermiteExpansion out;
  out.dim = e.dim;
  out.max_degree = e.max_degree;
  for (const auto& [alpha, a] : e.coeffs) {
    out.coeffs[alpha] = a * std::exp(-t * total_degree(alpha));
  }
  return out;
}

double density_ratio_norm(const HermiteExpansion& e, double t) {
  const MultiIndex zero(e.dim, 0);
  if (std::abs(e.coefficient(zero) - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "density_ratio_norm: zero coefficient must equal 1");
  }
  double s = 0.0;
  for (const auto& [alpha, a] : e.coeffs) {
    const int deg = total_degree(alpha);
    if (deg == 0) continue;
    s += a * a * multi_index_factorial(alpha) * std::exp(-2.0 * t * deg);
  }
  return std::sqrt(s);
}

HermiteExpansion project_density_ratio(const std::function<double(double)>& p0,
                                       int max_degree, int quadrature_order) {
  if (max_degree < 0) {
    throw std::invalid_argument("project_density_ratio: max_degree >= 0");
  }
  if (quadrature_order < 2 * std::max(max_degree, 1)) {
    throw std::invalid_argument(
        "project_density_ratio: quadrature_order must be >= 2*max_degree");
  }
  GaussHermiteRule rule(quadrature_order);
  HermiteExpansion e;
  e.dim = 1;
  e.max_degree = max_degree;
  double factorial = 1.0;
  for (int n = 0; n <= max_degree; ++n) {
    if (n > 0) factorial *= n;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i];
      const double f0 = p0(x) / norm_pdf(x);
      s += rule.weights[i] * f0 * hermite_eval(n, x);
    }
    e.coeffs[MultiIndex{n}] = s / factorial;
  }
  return e;
}

}  // namespace noiselab
