#pragma once

#include "fpdwalk/ctrw.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fpdwalk {

/// sup_x |ECDF(x) - cdf(x)| for a continuous cdf, evaluated exactly at the
/// jump points (ties grouped).
double ks_statistic(const EmpiricalCdf& ecdf, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution,
/// 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Asymptotic one-sample p-value with the finite-n argument
/// (sqrt(n) + 0.12 + 0.11/sqrt(n)) d.
double ks_pvalue(double d, std::size_t n);

/// Two-sample statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic two-sample p-value with n_e = n m / (n + m).
double ks_two_sample_pvalue(double d, std::size_t n, std::size_t m);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  /// Number of bins after pooling.
  int bins = 0;
};

/// Pearson goodness-of-fit. Adjacent categories are pooled left to right
/// until each pooled bin expects at least `min_expected` counts; a short
/// tail is merged into the last full bin.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probs,
                               double min_expected = 5.0);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

} // namespace fpdwalk
