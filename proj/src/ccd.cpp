#include "rsdesign/ccd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsdesign {

int ccd_core_runs(int q, bool half_fraction) {
  return (1 << (half_fraction ? q - 1 : q)) + 2 * q;
}

Design central_composite(int q, int runs, double rho, bool half_fraction) {
  if (q < 2 && half_fraction) throw std::invalid_argument("half fraction needs at least two factors");
  if (q < 1) throw std::invalid_argument("CCD needs at least one factor");
  const int core = ccd_core_runs(q, half_fraction);
  if (runs < core) {
    throw std::invalid_argument("CCD with q=" + std::to_string(q) + " needs at least " +
                                std::to_string(core) + " runs");
  }
  const double level = rho / std::sqrt(static_cast<double>(q));
  std::vector<FactorPoint> points;
  points.reserve(runs);

  const int free_factors = half_fraction ? q - 1 : q;
  for (int k = 0; k < (1 << free_factors); ++k) {
    FactorPoint p(q);
    double product = 1.0;
    for (int i = 0; i < free_factors; ++i) {
      // x1 varies slowest, matching standard-order tables
      const double s = ((k >> (free_factors - 1 - i)) & 1) ? 1.0 : -1.0;
      p[i] = s * level;
      product *= s;
    }
    if (half_fraction) p[q - 1] = product * level;
    points.push_back(std::move(p));
  }
  for (int i = 0; i < q; ++i) {
    for (double s : {-1.0, 1.0}) {
      FactorPoint p(q, 0.0);
      p[i] = s * rho;
      points.push_back(std::move(p));
    }
  }
  while (static_cast<int>(points.size()) < runs) points.emplace_back(q, 0.0);
  return Design(q, std::move(points));
}

}  // namespace rsdesign
