#include "pulsegraph/smoothing_spline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "pulsegraph/error.hpp"

namespace pulsegraph {

namespace {

double median_inplace(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

struct Design {
  double step{1};  // samples per knot interval
  int degree{5};
  Eigen::Index n_coef{0};
  // Per sample: first coefficient index and the degree + 1 basis weights.
  std::vector<Eigen::Index> first;
  Eigen::MatrixXd weights;
};

Design make_design(Eigen::Index n, double step, int degree) {
  Design d;
  d.step = step;
  d.degree = degree;
  d.n_coef = static_cast<Eigen::Index>(std::floor(static_cast<double>(n - 1) / step)) + degree + 1;
  d.first.resize(n);
  d.weights.resize(degree + 1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / step;
    const double c = std::floor(x);
    d.first[i] = static_cast<Eigen::Index>(c);
    d.weights.col(i) = uniform_bspline_weights(degree, x - c);
  }
  return d;
}

Eigen::VectorXd evaluate(const Design& d, const Eigen::VectorXd& coef) {
  const Eigen::Index n = static_cast<Eigen::Index>(d.first.size());
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = d.weights.col(i).dot(coef.segment(d.first[i], d.degree + 1));
  return out;
}

Eigen::SparseMatrix<double> gram(const Design& d) {
  const Eigen::Index k = d.degree + 1;
  Eigen::MatrixXd band = Eigen::MatrixXd::Zero(d.n_coef, k);  // band(j, r) = G(j, j + r)
  for (std::size_t i = 0; i < d.first.size(); ++i) {
    const auto w = d.weights.col(static_cast<Eigen::Index>(i));
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = a; b < k; ++b) band(d.first[i] + a, b - a) += w[a] * w[b];
  }
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < d.n_coef; ++j)
    for (Eigen::Index r = 0; r < k && j + r < d.n_coef; ++r) {
      t.emplace_back(j, j + r, band(j, r));
      if (r) t.emplace_back(j + r, j, band(j, r));
    }
  Eigen::SparseMatrix<double> g(d.n_coef, d.n_coef);
  g.setFromTriplets(t.begin(), t.end());
  return g;
}

Eigen::SparseMatrix<double> difference_penalty(Eigen::Index n_coef, int order) {
  // Rows of the order-th difference operator, binomial coefficients with alternating sign.
  std::vector<double> stencil{1.0};
  for (int o = 0; o < order; ++o) {
    std::vector<double> next(stencil.size() + 1, 0.0);
    for (std::size_t i = 0; i < stencil.size(); ++i) {
      next[i] -= stencil[i];
      next[i + 1] += stencil[i];
    }
    stencil = std::move(next);
  }
  std::vector<Eigen::Triplet<double>> t;
  const Eigen::Index rows = std::max<Eigen::Index>(n_coef - order, 0);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < stencil.size(); ++i) t.emplace_back(r, r + static_cast<Eigen::Index>(i), stencil[i]);
  Eigen::SparseMatrix<double> diff(rows, n_coef);
  diff.setFromTriplets(t.begin(), t.end());
  return diff.transpose() * diff;
}

}  // namespace

Eigen::VectorXd uniform_bspline_weights(int degree, double u) {
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(degree + 1);
  Eigen::VectorXd left(degree + 1), right(degree + 1);
  basis[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = u + j - 1;
    right[j] = j - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = basis[r] / (right[r + 1] + left[j - r]);
      basis[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    basis[j] = saved;
  }
  return basis;
}

double estimate_noise_floor(const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (y.size() < 3) return 0.0;
  std::vector<double> d2(static_cast<std::size_t>(y.size() - 2));
  for (Eigen::Index i = 0; i + 2 < y.size(); ++i) d2[i] = y[i] - 2.0 * y[i + 1] + y[i + 2];
  const double med = median_inplace(d2);
  for (auto& v : d2) v = std::abs(v - med);
  return 1.4826 * median_inplace(d2) / std::sqrt(6.0);
}

SmoothingSplineFit fit_smoothing_spline(const Eigen::Ref<const Eigen::VectorXd>& y,
                                        double sample_rate_hz,
                                        const SmoothingSplineOptions& opts) {
  if (opts.degree < 1 || opts.knot_spacing_s <= 0.0 || sample_rate_hz <= 0.0)
    throw Error(ErrorCode::InvalidInput, "smoothing spline: bad options");
  const double step = opts.knot_spacing_s * sample_rate_hz;
  const Eigen::Index n = y.size();
  if (static_cast<double>(n) < (opts.degree + 1) * step)
    throw Error(ErrorCode::InvalidInput, "smoothing spline: input shorter than spline support");

  SmoothingSplineFit fit;
  fit.noise_floor = estimate_noise_floor(y);

  const Design design = make_design(n, step, opts.degree);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(design.n_coef);
  for (Eigen::Index i = 0; i < n; ++i)
    rhs.segment(design.first[i], opts.degree + 1) += design.weights.col(i) * y[i];
  const Eigen::SparseMatrix<double> g = gram(design);
  const Eigen::SparseMatrix<double> p = difference_penalty(design.n_coef, opts.penalty_order);
  // Relative scale so that lambda is dimensionless.
  const double scale = g.diagonal().mean() / std::max(p.diagonal().mean(), 1e-300);
  const double ridge = 1e-10;

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  Eigen::SparseMatrix<double> system = g + (ridge * scale) * p;
  solver.analyzePattern(system);

  auto solve = [&](double lambda) {
    system = g + ((lambda + ridge) * scale) * p;
    solver.factorize(system);
    SmoothingSplineFit f;
    f.lambda = lambda;
    f.coefficients = solver.solve(rhs);
    f.fitted = evaluate(design, f.coefficients);
    f.residual_rms = std::sqrt((y - f.fitted).squaredNorm() / static_cast<double>(n));
    return f;
  };

  SmoothingSplineFit best;
  if (opts.lambda >= 0.0) {
    best = solve(opts.lambda);
  } else {
    best = solve(0.0);
    if (best.residual_rms < fit.noise_floor) {
      // Residual RMS grows monotonically with lambda; bisect in log space.
      double lo = -8.0, hi = 10.0;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto trial = solve(std::pow(10.0, mid));
        if (trial.residual_rms > fit.noise_floor) {
          hi = mid;
        } else {
          lo = mid;
          best = std::move(trial);
        }
      }
    }
  }
  best.noise_floor = fit.noise_floor;
  return best;
}

Eigen::VectorXd natural_cubic_spline(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& xq) {
  const Eigen::Index n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorCode::InvalidInput, "cubic spline: need >= 2 knots");
  // Second derivatives m with m[0] = m[n-1] = 0 (tridiagonal, Thomas algorithm).
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
  if (n > 2) {
    const Eigen::Index k = n - 2;
    Eigen::VectorXd diag(k), upper(k), rhs(k);
    for (Eigen::Index i = 1; i <= k; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for (Eigen::Index i = 1; i < k; ++i) {
      const double lower = x[i + 1] - x[i];  // sub-diagonal entry of row i equals h_i
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m[k] = rhs[k - 1] / diag[k - 1];
    for (Eigen::Index i = k - 2; i >= 0; --i) m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
  }
  Eigen::VectorXd out(xq.size());
  for (Eigen::Index q = 0; q < xq.size(); ++q) {
    const double t = xq[q];
    auto it = std::upper_bound(x.data(), x.data() + n, t);
    Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - x.data()) - 1, 0, n - 2);
    const double h = x[i + 1] - x[i];
    const double a = (x[i + 1] - t) / h, b = (t - x[i]) / h;
    out[q] = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  }
  return out;
}

}  // namespace pulsegraph
