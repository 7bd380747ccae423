#include "ooc/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ooc/errors.hpp"

namespace ooc {

PGrid uniform_pgrid(double p0, int m) {
  if (p0 < 0.0 || p0 >= 1.0) {
    fail(errc::invalid_config, "grid anchor p0 must lie in [0, 1)");
  }
  if (m < 2) fail(errc::grid_too_small, "grid needs at least 2 levels");
  PGrid grid;
  grid.p0 = p0;
  grid.levels.resize(m);
  for (int i = 0; i < m; ++i) {
    grid.levels[i] = p0 + (1.0 - p0) * static_cast<double>(i) /
                              static_cast<double>(m - 1);
  }
  grid.levels[m - 1] = 1.0;  // exact endpoint
  return grid;
}

double corruption_level(double p, double p0) {
  if (p0 < 0.0 || p0 >= 1.0) {
    fail(errc::invalid_config, "p0 must lie in [0, 1)");
  }
  if (p < p0 - 1e-12 || p > 1.0 + 1e-12) {
    fail(errc::invalid_config, "level p=" + std::to_string(p) +
                                   " outside [p0, 1] with p0=" +
                                   std::to_string(p0));
  }
  return std::clamp((p - p0) / (1.0 - p0), 0.0, 1.0);
}

Eigen::VectorXd binomial_pmf(Index n, double p) {
  if (n < 1) fail(errc::invalid_config, "binomial pmf needs n >= 1");
  if (p < 0.0 || p > 1.0) {
    fail(errc::invalid_config, "binomial pmf needs p in [0, 1]");
  }
  Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
  if (p == 0.0) {
    row[0] = 1.0;
    return row;
  }
  if (p == 1.0) {
    row[n] = 1.0;
    return row;
  }

  // Start at the mode and recur outward; each step multiplies by an exactly
  // representable ratio, so relative error stays near machine precision for
  // every entry that does not underflow.
  const double q = 1.0 - p;
  const Index mode = std::min<Index>(
      n, static_cast<Index>(std::floor((static_cast<double>(n) + 1.0) * p)));
  const double log_mode =
      std::lgamma(static_cast<double>(n) + 1.0) -
      std::lgamma(static_cast<double>(mode) + 1.0) -
      std::lgamma(static_cast<double>(n - mode) + 1.0) +
      static_cast<double>(mode) * std::log(p) +
      static_cast<double>(n - mode) * std::log(q);
  row[mode] = std::exp(log_mode);
  constexpr double kUnderflow = 1e-320;
  for (Index j = mode; j < n; ++j) {
    const double next = row[j] * (static_cast<double>(n - j) * p) /
                        (static_cast<double>(j + 1) * q);
    if (next < kUnderflow) break;
    row[j + 1] = next;
  }
  for (Index j = mode; j > 0; --j) {
    const double prev = row[j] * (static_cast<double>(j) * q) /
                        (static_cast<double>(n - j + 1) * p);
    if (prev < kUnderflow) break;
    row[j - 1] = prev;
  }

  // Compensated (Kahan) sum, then normalize so the row sums to 1 exactly up
  // to one rounding per entry.
  double sum = 0.0, carry = 0.0;
  for (Index j = 0; j <= n; ++j) {
    const double t = row[j] - carry;
    const double s = sum + t;
    carry = (s - sum) - t;
    sum = s;
  }
  row /= sum;
  return row;
}

BinomialDesign binomial_design(Index n, const PGrid& grid) {
  if (grid.size() < 2) fail(errc::grid_too_small, "design needs >= 2 levels");
  BinomialDesign design;
  design.n = n;
  design.grid = grid;
  design.matrix.resize(grid.size(), n + 1);
  for (int i = 0; i < grid.size(); ++i) {
    design.matrix.row(i) = binomial_pmf(n, grid.levels[i]).transpose();
  }
  return design;
}

double bernstein_eval(const Eigen::VectorXd& coef, double p) {
  if (coef.size() == 0) fail(errc::invalid_config, "empty coefficient vector");
  if (p < 0.0 || p > 1.0) {
    fail(errc::invalid_config, "Bernstein parameter must lie in [0, 1]");
  }
  std::vector<double> work(coef.data(), coef.data() + coef.size());
  const double q = 1.0 - p;
  for (size_t level = work.size() - 1; level > 0; --level) {
    for (size_t j = 0; j < level; ++j) {
      work[j] = q * work[j] + p * work[j + 1];
    }
  }
  return work[0];
}

Eigen::VectorXd basis_row(const BasisSpec& spec, double x) {
  if (spec.degree < 0) fail(errc::invalid_config, "basis degree must be >= 0");
  Eigen::VectorXd row(spec.degree + 1);
  if (spec.kind == BasisKind::monomial) {
    double v = 1.0;
    for (int j = 0; j <= spec.degree; ++j) {
      row[j] = v;
      v *= x;
    }
    return row;
  }
  // Chebyshev on [0, 1]: T_j(2x - 1) by the three-term recurrence.
  const double t = 2.0 * x - 1.0;
  row[0] = 1.0;
  if (spec.degree >= 1) row[1] = t;
  for (int j = 2; j <= spec.degree; ++j) {
    row[j] = 2.0 * t * row[j - 1] - row[j - 2];
  }
  return row;
}

Eigen::MatrixXd basis_matrix(const BasisSpec& spec, Index n) {
  if (n < 1) fail(errc::invalid_config, "basis matrix needs n >= 1");
  Eigen::MatrixXd psi(n + 1, spec.degree + 1);
  for (Index j = 0; j <= n; ++j) {
    psi.row(j) =
        basis_row(spec, static_cast<double>(j) / static_cast<double>(n))
            .transpose();
  }
  return psi;
}

namespace {

// Monomial coefficients of each basis function: row t holds c with
// psi_t(x) = sum_r c[r] x^r.
Eigen::MatrixXd monomial_coefficients(const BasisSpec& spec) {
  const int s = spec.degree;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(s + 1, s + 1);
  if (spec.kind == BasisKind::monomial) {
    C.setIdentity();
    return C;
  }
  // Shifted Chebyshev: T~_0 = 1, T~_1 = 2x - 1,
  // T~_{j+1} = 2(2x - 1) T~_j - T~_{j-1}, expanded in coefficient space.
  C(0, 0) = 1.0;
  if (s >= 1) {
    C(1, 0) = -1.0;
    C(1, 1) = 2.0;
  }
  for (int j = 2; j <= s; ++j) {
    for (int r = 0; r <= j; ++r) {
      double v = -2.0 * C(j - 1, r) - C(j - 2, r);
      if (r >= 1) v += 4.0 * C(j - 1, r - 1);
      C(j, r) = v;
    }
  }
  return C;
}

// Raw moments mu_r(p) = E[(K/n)^r], K ~ Binomial(n, p), for r = 0..s, via
// Stirling numbers of the second kind and falling factorials of n.
Eigen::VectorXd scaled_moments(Index n, double p, int s) {
  // S(r, l) table.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(s + 1, s + 1);
  S(0, 0) = 1.0;
  for (int r = 1; r <= s; ++r) {
    for (int l = 1; l <= r; ++l) {
      S(r, l) = S(r - 1, l - 1) + static_cast<double>(l) * S(r - 1, l);
    }
  }
  // fall[l] = prod_{i=0}^{l-1} (n - i) / n.
  Eigen::VectorXd fall(s + 1);
  fall[0] = 1.0;
  for (int l = 1; l <= s; ++l) {
    fall[l] = l <= n ? fall[l - 1] * (static_cast<double>(n - l + 1) /
                                      static_cast<double>(n))
                     : 0.0;
  }
  Eigen::VectorXd mu(s + 1);
  for (int r = 0; r <= s; ++r) {
    double acc = 0.0, pow_p = 1.0;
    for (int l = 0; l <= r; ++l) {
      // S(r, l) n^(l) p^l / n^r, with n^(l) / n^l held in fall[l] so the
      // remaining n^(l - r) factor stays well scaled.
      double term = S(r, l) * fall[l] * pow_p;
      for (int i = l; i < r; ++i) term /= static_cast<double>(n);
      acc += term;
      pow_p *= p;
    }
    mu[r] = acc;
  }
  return mu;
}

}  // namespace

Eigen::MatrixXd binomial_basis_product(Index n, const PGrid& grid,
                                       const BasisSpec& spec) {
  if (n < 1) fail(errc::invalid_config, "product needs n >= 1");
  if (spec.degree < 0) fail(errc::invalid_config, "degree must be >= 0");
  const int m = grid.size();
  const int s = spec.degree;
  const Eigen::MatrixXd C = monomial_coefficients(spec);
  Eigen::MatrixXd out(m, s + 1);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd mu = scaled_moments(n, grid.levels[i], s);
    out.row(i) = (C * mu).transpose();
  }
  return out;
}

SketchedDesign sketch_design(const BinomialDesign& design, int k) {
  const Index n = design.n;
  if (k < 1 || static_cast<Index>(k) > n) {
    fail(errc::invalid_config, "sketch size k must lie in [1, n]");
  }
  SketchedDesign out;
  out.k = k;
  out.assignment.assign(static_cast<size_t>(n) + 1, 0);
  out.representatives.resize(static_cast<size_t>(k) + 1);
  out.representatives[0] = 0;  // column 0 is kept exactly
  out.sketch.resize(design.matrix.rows(), k + 1);
  out.sketch.col(0) = design.matrix.col(0);

  // Columns 1..n in k contiguous runs; the first (n % k) runs get the extra
  // column when k does not divide n.
  const Index base = n / k;
  const Index remainder = n % k;
  Index start = 1;
  for (int g = 0; g < k; ++g) {
    const Index size = base + (g < remainder ? 1 : 0);
    const Index end = start + size;  // exclusive

    // Medoid: column minimizing the total Euclidean distance to the rest of
    // its run; ties resolve to the lowest column index.
    Index best = start;
    double best_total = std::numeric_limits<double>::infinity();
    for (Index c = start; c < end; ++c) {
      double total = 0.0;
      for (Index o = start; o < end; ++o) {
        total += (design.matrix.col(c) - design.matrix.col(o)).norm();
      }
      if (total < best_total) {
        best_total = total;
        best = c;
      }
    }
    out.representatives[static_cast<size_t>(g) + 1] = best;
    out.sketch.col(g + 1) = design.matrix.col(best);
    for (Index c = start; c < end; ++c) {
      out.assignment[static_cast<size_t>(c)] = g + 1;
    }
    start = end;
  }

  double eps = 0.0;
  for (Index c = 0; c <= n; ++c) {
    const int sc = out.assignment[static_cast<size_t>(c)];
    eps = std::max(
        eps, (design.matrix.col(c) - out.sketch.col(sc)).norm());
  }
  out.epsilon = eps;
  return out;
}

double sketch_error_bound(const SketchedDesign& sketch, double e0_hat,
                          Index n) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sketch.sketch);
  if (cod.rank() < sketch.sketch.cols()) {
    fail(errc::rank_deficient,
         "sketched design is rank deficient; decrease k or enlarge the grid");
  }
  const Eigen::MatrixXd pinv = cod.pseudoInverse();
  const double row_norm = pinv.row(0).norm();
  return sketch.epsilon * static_cast<double>(n) * row_norm *
         std::abs(e0_hat);
}

}  // namespace ooc
