#ifndef RSDESIGN_REGION_HPP
#define RSDESIGN_REGION_HPP

#include <vector>

#include "rsdesign/model.hpp"

namespace rsdesign {

/// p x p matrix of region-averaged products f(x) f(x)'.
using MomentMatrix = Matrix;

/// Mean of the monomial prod x_i^e_i under the uniform measure on the region
/// (volume-normalized).
double region_monomial_mean(const Region& region, const std::vector<int>& exponents);

/// Mean of prod x_i^e_i under the uniform measure on the sphere surface of
/// radius `radius` in q dimensions.
double shell_monomial_mean(int q, double radius, const std::vector<int>& exponents);

/// Volume-normalized moment matrix M of the region. For the full
/// second-order model the entries follow the closed forms
///   cube:  E[x^2]=1/3, E[x^4]=1/5, E[x_i^2 x_j^2]=1/9
///   ball:  E[x^2]=rho^2/(q+2), E[x^4]=3rho^4/((q+2)(q+4)),
///          E[x_i^2 x_j^2]=rho^4/((q+2)(q+4))
MomentMatrix moment_matrix(const Region& region, const ModelSpec& model);

/// M with its first row and column zeroed (moments of f(x) - f(0)).
MomentMatrix difference_moment_matrix(const Region& region, const ModelSpec& model);

/// Zeroes the intercept row and column of any moment matrix.
MomentMatrix zero_intercept(MomentMatrix m);

/// Surface-normalized moments on the sphere of radius r * max_radius().
/// Throws for r <= 0.
MomentMatrix shell_moment_matrix(const Region& region, const ModelSpec& model, double r);
MomentMatrix shell_difference_moment_matrix(const Region& region, const ModelSpec& model,
                                            double r);

/// Moments over the sphere surface of radius rho (shell_moment_matrix at r=1).
MomentMatrix surface_moment_matrix(const Region& region, const ModelSpec& model);

/// Fraction of the region volume lying within distance r * max_radius() of
/// the center. Sphere: r^q. Cube: exact inside the inscribed ball, tabulated
/// one-dimensional quadrature of the ball-cube intersection beyond it.
double volume_fraction(const Region& region, double r);

/// Volume of the q-dimensional ball of the given radius.
double ball_volume(int q, double radius);

}  // namespace rsdesign

#endif  // RSDESIGN_REGION_HPP
