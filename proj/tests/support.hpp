#ifndef RSDESIGN_TESTS_SUPPORT_HPP
#define RSDESIGN_TESTS_SUPPORT_HPP

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rsdesign/ccd.hpp"
#include "rsdesign/criteria.hpp"
#include "rsdesign/csv_io.hpp"
#include "rsdesign/model.hpp"

namespace testing {

inline std::string fixture(const std::string& name) {
  return std::string(RSDESIGN_FIXTURES_DIR) + "/" + name;
}

// Cassava bread example: q=3 cube, n=26.
inline std::vector<rsdesign::LabeledDesign> cube_example_designs() {
  std::vector<rsdesign::LabeledDesign> out;
  for (int i = 4; i <= 8; ++i) {
    const std::string name = "cassava_design" + std::to_string(i) + ".csv";
    out.push_back({std::to_string(i), rsdesign::read_design_file(fixture(name))});
  }
  return out;
}

inline const double kSphereRho = std::sqrt(5.0);

inline rsdesign::Design sphere_example_design(int number) {
  const std::string name = "sphere5_design" + std::to_string(number) + ".csv";
  return rsdesign::snap_to_sphere(rsdesign::read_design_file(fixture(name)), kSphereRho);
}

// q=5 sphere example designs with the CCD inserted as design 6.
inline std::vector<rsdesign::LabeledDesign> sphere_example_designs(const std::vector<int>& numbers) {
  std::vector<rsdesign::LabeledDesign> out;
  for (int i : numbers) {
    if (i == 6) out.push_back({"6", rsdesign::central_composite(5, 30, kSphereRho, true)});
    else out.push_back({std::to_string(i), sphere_example_design(i)});
  }
  return out;
}

inline rsdesign::CriterionContext cube_context() {
  const auto model = rsdesign::ModelSpec::full_quadratic(3);
  rsdesign::CriterionConfig cfg;
  cfg.kappa[0] = 1.0;
  cfg.weights = rsdesign::default_weights(model, 0.25);
  return rsdesign::CriterionContext(model, rsdesign::Region::cube(3), cfg);
}

inline rsdesign::CriterionContext sphere_context() {
  const auto model = rsdesign::ModelSpec::full_quadratic(5);
  rsdesign::CriterionConfig cfg;
  cfg.kappa[0] = 1.0;
  cfg.weights = rsdesign::default_weights(model, 1.0);
  return rsdesign::CriterionContext(model, rsdesign::Region::sphere(5, kSphereRho), cfg);
}

// Published efficiencies, columns D_S (DP)_S A_S (AP)_S I (IP) I_D (I_DP).
struct PublishedRow {
  int design;
  int pure_error;
  int lack_of_fit;
  std::array<double, 8> eff;
};

inline const std::vector<PublishedRow> kCubeTable = {
    {4, 5, 11, {90.71, 52.42, 87.71, 64.87, 100.00, 73.88, 99.87, 73.19}},
    {5, 12, 4, {79.79, 78.70, 72.80, 74.95, 97.23, 100.00, 87.47, 89.23}},
    {6, 5, 11, {93.36, 53.96, 90.67, 67.06, 97.22, 71.83, 100.00, 73.28}},
    {7, 12, 4, {95.29, 93.99, 92.11, 94.82, 92.00, 94.63, 98.03, 100.00}},
    {8, 12, 4, {98.68, 97.34, 96.96, 99.82, 84.34, 86.74, 96.77, 98.71}},
};

inline const std::vector<PublishedRow> kSphereTable = {
    {1, 0, 9, {100.00, 0.00, 94.02, 0.00, 100.00, 0.00, 60.31, 0.00}},
    {2, 9, 0, {86.30, 100.00, 74.33, 90.36, 74.73, 97.81, 52.80, 65.56}},
    {3, 1, 8, {98.16, 1.35, 100.00, 3.85, 92.86, 3.85, 81.20, 3.10}},
    {4, 8, 1, {87.39, 94.39, 85.48, 100.00, 74.34, 93.64, 844.84, 98.28}},
    {5, 8, 1, {88.84, 95.95, 79.04, 92.47, 79.39, 100.00, 54.37, 62.99}},
    {6, 3, 6, {96.96, 38.09, 95.25, 58.51, 91.82, 60.73, 100.00, 60.82}},
    {7, 8, 1, {85.37, 92.20, 83.63, 97.83, 72.21, 90.95, 86.32, 100.00}},
    {8, 7, 2, {85.74, 84.69, 82.89, 92.22, 73.35, 87.87, 87.46, 96.35}},
    {9, 5, 4, {86.71, 64.73, 85.61, 80.60, 76.58, 77.62, 93.34, 87.02}},
    {10, 5, 4, {93.49, 69.79, 91.88, 86.50, 84.56, 85.72, 87.32, 81.40}},
};

// Published cells that are misprints: design 4 I_D (84.84 printed with an
// extra digit) and design 2 (I_DP) (computes to 63.56).
inline bool sphere_cell_is_misprint(int design, int column) {
  return (design == 4 && column == 6) || (design == 2 && column == 7);
}

// Rescales published columns so that each column's best among `rows` is 100.
inline std::vector<std::array<double, 8>> renormalize(const std::vector<PublishedRow>& rows) {
  std::array<double, 8> best{};
  for (const auto& r : rows)
    for (int c = 0; c < 8; ++c) best[c] = std::max(best[c], r.eff[c]);
  std::vector<std::array<double, 8>> out;
  for (const auto& r : rows) {
    std::array<double, 8> e{};
    for (int c = 0; c < 8; ++c) e[c] = 100.0 * r.eff[c] / best[c];
    out.push_back(e);
  }
  return out;
}

}  // namespace testing

#endif  // RSDESIGN_TESTS_SUPPORT_HPP
