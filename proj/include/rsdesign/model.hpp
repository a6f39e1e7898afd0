#ifndef RSDESIGN_MODEL_HPP
#define RSDESIGN_MODEL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rsdesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A treatment in coded units: one level per factor.
using FactorPoint = std::vector<double>;

/// One monomial of the polynomial model.
struct Term {
  enum class Kind { Intercept, Linear, Quadratic, Interaction };

  Kind kind = Kind::Intercept;
  int first = -1;   // factor index for Linear/Quadratic/Interaction
  int second = -1;  // second factor index for Interaction (first < second)

  std::string label() const;
  /// Exponent of factor `i` in this monomial.
  int exponent(int i) const;
};

/// Ordered term list of a polynomial model in q factors.
///
/// The full second-order model uses the fixed layout
///   1, x1..xq, x1^2..xq^2, x1x2, x1x3, ..., x(q-1)xq
/// so that model matrices, weight vectors and moment matrices line up
/// index-for-index.
class ModelSpec {
 public:
  static ModelSpec full_quadratic(int q);
  /// Intercept-only model; useful as a sanity baseline for graphs.
  static ModelSpec intercept_only(int q);

  int factors() const { return q_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_full_quadratic() const { return full_quadratic_; }

  /// f(x) in term order. Throws std::invalid_argument on dimension mismatch.
  Vector expand(std::span<const double> x) const;
  void expand_into(std::span<const double> x, Eigen::Ref<Vector> out) const;

 private:
  ModelSpec(int q, std::vector<Term> terms, bool full);

  int q_ = 0;
  std::vector<Term> terms_;
  bool full_quadratic_ = false;
};

enum class RegionKind { Cube, Sphere };

/// Experimental region in coded units: the cube [-1,1]^q or the ball of
/// radius rho.
struct Region {
  RegionKind kind = RegionKind::Cube;
  int q = 1;
  double rho = 1.0;

  static Region cube(int q);
  static Region sphere(int q, double rho);

  /// Distance of the farthest region point from the center.
  double max_radius() const;
  bool contains(std::span<const double> x, double tol = 1e-9) const;
  std::string describe() const;
};

class Design {
 public:
  Design() = default;
  Design(int q, std::vector<FactorPoint> points);

  int runs() const { return static_cast<int>(points_.size()); }
  int factors() const { return q_; }
  const std::vector<FactorPoint>& points() const { return points_; }
  const FactorPoint& operator[](std::size_t i) const { return points_[i]; }

 private:
  int q_ = 0;
  std::vector<FactorPoint> points_;
};

/// Pure-error and lack-of-fit degrees of freedom.
struct DfAccounting {
  int distinct = 0;       // t
  int pure_error = 0;     // d = n - t
  int lack_of_fit = 0;    // t - p, may be negative
};

/// Number of distinct treatments after rounding coordinates to 10 decimals.
int distinct_points(const Design& design);
DfAccounting df_accounting(const Design& design, const ModelSpec& model);

/// n x p matrix whose i-th row is f(x_i)'.
Matrix model_matrix(const ModelSpec& model, const Design& design);
/// X with the intercept column removed (n x (p-1)).
Matrix model_matrix_without_intercept(const ModelSpec& model, const Design& design);
/// Q = I - 11'/n.
Matrix centering_projector(int n);

struct CandidateSet {
  std::vector<FactorPoint> points;
  Region region;

  std::size_t size() const { return points.size(); }
};

/// Cube: the full 3^q grid. Sphere: the center plus every nonzero
/// {-1,0,1}^q point pushed radially onto the sphere of radius rho.
/// Points are enumerated in odometer order with x1 varying slowest.
CandidateSet candidate_set(int q, const Region& region);

/// Replaces rounded published coordinates (e.g. 1.12, 2.24) by their exact
/// on-sphere values sign * rho / sqrt(k), k being the number of nonzero
/// coordinates. Points not within 2% of the sphere surface are left alone.
Design snap_to_sphere(const Design& design, double rho);

}  // namespace rsdesign

#endif  // RSDESIGN_MODEL_HPP
