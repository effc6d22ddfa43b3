#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cmpp::stats {

// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

// Sample mean and standard error of the mean (two-pass, pairwise sums).
Summary summarize(std::span<const double> values);

// Column-major table filled by evaluating `row_fn(i, row)` for i in [0, n) on
// a pool of worker threads. Row i is always produced by the same call, so the
// table does not depend on the number of workers.
class SampleTable {
 public:
  SampleTable(std::size_t rows, std::size_t columns);
  static SampleTable generate(std::size_t rows, std::size_t columns,
                              const std::function<void(std::size_t, std::span<double>)>& row_fn);

  std::span<const double> column(std::size_t j) const;
  std::span<double> column(std::size_t j);
  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return columns_; }

 private:
  std::size_t rows_;
  std::size_t columns_;
  std::vector<double> data_;
};

// Worker count: CMPP_THREADS when set, else the hardware concurrency.
unsigned worker_count();

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

// Goodness of fit of counts over categories 0..K-1 against probabilities;
// the upper tail is folded into the last category and adjacent categories are
// merged until every expected count is at least `min_expected`.
ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> probabilities,
                         double total, double min_expected = 5.0);

// Kolmogorov-Smirnov statistic of a sample against a continuous cdf.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Asymptotic critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
double ks_critical(std::size_t n, double alpha);

double normal_quantile(double p);
// Two-sided per-cell z threshold for a family of m tests at level alpha.
double bonferroni_z(double family_alpha, std::size_t m);

// Empirical quantile (type 7) of an unsorted sample.
double empirical_quantile(std::vector<double> sample, double p);

}  // namespace cmpp::stats
