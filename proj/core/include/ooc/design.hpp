#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ooc/dataset.hpp"

namespace ooc {

/// Grid of contamination levels p_0 <= p_1 <= ... <= p_{m-1} <= 1 anchored
/// at the split's nominal level p0.
struct PGrid {
  double p0 = 0.0;
  Eigen::VectorXd levels;
  int size() const { return static_cast<int>(levels.size()); }
};

/// Evenly spaced grid of m levels from p0 to 1 inclusive.
PGrid uniform_pgrid(double p0, int m);

/// Mixture weight p' = (p - p0) / (1 - p0) mapping the grid back to [0, 1].
double corruption_level(double p, double p0);

/// Row i holds the Binomial(n, p_i) pmf over k = 0..n.  Rows for p in
/// {0, 1} are exact unit vectors; interior rows are computed by an outward
/// recurrence from the mode and compensated-normalized, so each row sums to
/// 1 within 1e-12 even at n = 1e5.
struct BinomialDesign {
  Eigen::MatrixXd matrix;  // m x (n+1)
  Index n = 0;
  PGrid grid;
};

BinomialDesign binomial_design(Index n, const PGrid& grid);

/// Single Binomial(n, p) pmf row of length n+1.
Eigen::VectorXd binomial_pmf(Index n, double p);

/// Value of the Bernstein form with the given coefficients at p, evaluated
/// by de Casteljau's recurrence.  Agrees with binomial_pmf(n, p).dot(coef).
double bernstein_eval(const Eigen::VectorXd& coef, double p);

enum class BasisKind { monomial, chebyshev };

struct BasisSpec {
  BasisKind kind = BasisKind::chebyshev;
  int degree = 2;
};

/// (n+1) x (degree+1) matrix of basis functions evaluated at k/n.
/// Chebyshev polynomials are mapped to [0, 1] via x -> 2x - 1.
Eigen::MatrixXd basis_matrix(const BasisSpec& spec, Index n);

/// Basis functions evaluated at a single point x in [0, 1].
Eigen::VectorXd basis_row(const BasisSpec& spec, double x);

/// The product binomial_design(n, grid).matrix * basis_matrix(spec, n)
/// computed without forming either factor: entry (i, j) is
/// E[psi_j(K/n)] for K ~ Binomial(n, p_i), expanded through binomial raw
/// moments.  Cost is O(m * degree^2), independent of n.
Eigen::MatrixXd binomial_basis_product(Index n, const PGrid& grid,
                                       const BasisSpec& spec);

/// Column sketch of a binomial design.  Column 0 is kept exactly; columns
/// 1..n are grouped into k contiguous runs of near-equal size and each run
/// is replaced by its medoid (smallest total Euclidean distance, ties to
/// the lowest index).
struct SketchedDesign {
  Eigen::MatrixXd sketch;              // m x (k+1)
  std::vector<int> assignment;         // n+1: design column -> sketch column
  std::vector<Index> representatives;  // sketch column -> design column
  double epsilon = 0.0;  // max_j ||A_j - sketch[assignment[j]]||_2
  int k = 0;
};

SketchedDesign sketch_design(const BinomialDesign& design, int k);

/// Worst-case extrapolation error |e0_hat - e0| <= epsilon * n * ||s|| *
/// e0_hat, where s is the first row of the sketch's left pseudoinverse.
/// Throws when the sketch is rank deficient.
double sketch_error_bound(const SketchedDesign& sketch, double e0_hat,
                          Index n);

}  // namespace ooc
