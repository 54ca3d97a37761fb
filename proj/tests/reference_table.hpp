#pragma once

#include <array>

namespace escalife::testdata {

// Published 2021Q4 fleet results: age, RUL, LHI and the five normalised
// variables, as printed (two decimals).
struct PublishedRow {
  int id;
  double actual_age;
  double years_till_end;
  double rul;
  double lhi;
  double working_hours;
  double passenger_load;
  double at_areas;
  double fixed_loss_residual;
  double fault_counts;
};

inline constexpr std::array<PublishedRow, 24> kPublished{{
    {0, 6.34, 28.66, 14.82, 0.36, 0.18, 0.16, 0.90, 0.22, 0.24},
    {1, 6.34, 28.66, 17.68, 0.29, 0.18, 0.15, 0.74, 0.08, 0.03},
    {2, 23.59, 11.41, 16.65, 0.31, 0.66, 0.31, 0.36, 0.00, 0.12},
    {3, 23.59, 11.41, 21.48, 0.23, 0.67, 0.28, 0.10, 0.00, 0.06},
    {4, 18.05, 16.95, 21.36, 0.23, 0.48, 0.14, 0.22, 0.15, 0.09},
    {5, 18.05, 16.95, 18.68, 0.27, 0.33, 0.16, 0.19, 0.55, 0.12},
    {6, 12.44, 22.56, 18.34, 0.28, 0.37, 0.19, 0.55, 0.00, 0.06},
    {7, 12.44, 22.56, 25.51, 0.17, 0.37, 0.16, 0.23, 0.00, 0.00},
    {8, 18.05, 16.95, 23.11, 0.20, 0.38, 0.20, 0.20, 0.14, 0.00},
    {9, 18.05, 16.95, 15.14, 0.35, 0.49, 0.28, 0.37, 0.40, 0.03},
    {10, 18.05, 16.95, 27.53, 0.15, 0.06, 0.03, 0.20, 0.36, 0.03},
    {11, 18.05, 16.95, 24.27, 0.19, 0.49, 0.08, 0.19, 0.00, 0.18},
    {12, 18.05, 16.95, 14.60, 0.36, 0.50, 0.41, 0.10, 0.64, 0.21},
    {13, 18.05, 16.95, 19.27, 0.26, 0.50, 0.35, 0.09, 0.11, 0.06},
    {14, 18.05, 16.95, 14.25, 0.37, 0.51, 0.50, 0.24, 0.45, 0.06},
    {15, 18.05, 16.95, 16.85, 0.31, 0.51, 0.37, 0.39, 0.00, 0.18},
    {16, 17.00, 18.00, 25.15, 0.18, 0.37, 0.13, 0.18, 0.06, 0.12},
    {17, 17.00, 18.00, 16.07, 0.33, 0.37, 0.11, 0.39, 0.54, 0.06},
    {18, 18.05, 16.95, 17.68, 0.29, 0.48, 0.40, 0.27, 0.10, 0.18},
    {19, 18.05, 16.95, 11.25, 0.45, 0.48, 0.34, 0.43, 0.72, 0.15},
    {20, 18.05, 16.95, 22.66, 0.21, 0.46, 0.22, 0.20, 0.07, 0.00},
    {21, 18.05, 16.95, 15.36, 0.34, 0.50, 0.26, 0.42, 0.28, 0.09},
    {22, 18.05, 16.95, 15.16, 0.35, 0.50, 0.38, 0.47, 0.14, 0.03},
    {23, 18.05, 16.95, 18.84, 0.27, 0.50, 0.13, 0.20, 0.40, 0.03},
}};

}  // namespace escalife::testdata
