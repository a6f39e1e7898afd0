#ifndef RSDESIGN_NUMERICS_HPP
#define RSDESIGN_NUMERICS_HPP

#include <optional>

#include "rsdesign/model.hpp"

namespace rsdesign {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(F > f) for F ~ F(df1, df2), df2 >= 1.
double f_upper_tail(int df1, int df2, double f);

/// Quantile of the F(df1, df2) distribution at probability `level`.
/// Returns +infinity when df2 == 0 (no pure-error degrees of freedom).
/// Throws std::invalid_argument unless 0 < level < 1 and df1 >= 1.
double f_quantile(int df1, int df2, double level);

/// Memoized f_quantile; safe to call concurrently.
double f_quantile_cached(int df1, int df2, double level);

/// Relative pivot below which a symmetric matrix is treated as singular.
inline constexpr double kSingularPivot = 1e-12;

/// log|m| for symmetric positive semi-definite m via LDL'. Returns -infinity
/// when a pivot falls below kSingularPivot times the largest pivot.
/// Throws std::invalid_argument for non-symmetric input.
double logdet_psd(const Matrix& m);

/// trace(m * a^{-1}) via linear solves. Empty when `a` is singular.
std::optional<double> trace_prod_inv(const Matrix& a, const Matrix& m);

/// Numerical rank of a symmetric PSD matrix (eigenvalues above
/// kSingularPivot times the largest).
int psd_rank(const Matrix& m);

}  // namespace rsdesign

#endif  // RSDESIGN_NUMERICS_HPP
