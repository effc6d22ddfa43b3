#include "cmpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace cmpp::stats {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = pairwise_sum(values) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - s.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(s.n - 1);
  s.std_error = std::sqrt(var / static_cast<double>(s.n));
  return s;
}

SampleTable::SampleTable(std::size_t rows, std::size_t columns)
    : rows_(rows), columns_(columns), data_(rows * columns, 0.0) {}

std::span<const double> SampleTable::column(std::size_t j) const {
  return std::span<const double>(data_).subspan(j * rows_, rows_);
}

std::span<double> SampleTable::column(std::size_t j) { return std::span<double>(data_).subspan(j * rows_, rows_); }

unsigned worker_count() {
  if (const char* env = std::getenv("CMPP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SampleTable SampleTable::generate(std::size_t rows, std::size_t columns,
                                  const std::function<void(std::size_t, std::span<double>)>& row_fn) {
  SampleTable table(rows, columns);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(rows, 1)));
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> row(columns);
    try {
      for (std::size_t i = begin; i < end; ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        row_fn(i, row);
        for (std::size_t j = 0; j < columns; ++j) table.data_[j * rows + i] = row[j];
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers <= 1) {
    work(0, rows);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (rows + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(rows, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

ChiSquare chi_square_gof(std::span<const double> observed, std::span<const double> probabilities, double total,
                         double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty())
    throw std::invalid_argument("chi-square needs matching, nonempty category lists");
  std::vector<double> obs(observed.begin(), observed.end());
  std::vector<double> exp;
  double mass = 0.0;
  for (double p : probabilities) {
    exp.push_back(p * total);
    mass += p;
  }
  exp.back() += std::max(0.0, 1.0 - mass) * total;

  // Merge from the right, then from the left, until every bin is large enough.
  std::vector<double> o2;
  std::vector<double> e2;
  double acc_o = 0.0;
  double acc_e = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    acc_o += obs[i];
    acc_e += exp[i];
    if (acc_e >= min_expected) {
      o2.push_back(acc_o);
      e2.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e2.empty()) {
      o2.push_back(acc_o);
      e2.push_back(acc_e);
    } else {
      o2.back() += acc_o;
      e2.back() += acc_e;
    }
  }
  ChiSquare r;
  for (std::size_t i = 0; i < o2.size(); ++i) {
    const double d = o2[i] - e2[i];
    r.statistic += d * d / e2[i];
  }
  r.dof = static_cast<int>(o2.size()) - 1;
  if (r.dof < 1) {
    r.p_value = 1.0;
    return r;
  }
  boost::math::chi_squared_distribution<double> chi(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

double bonferroni_z(double family_alpha, std::size_t m) {
  return normal_quantile(1.0 - family_alpha / (2.0 * static_cast<double>(std::max<std::size_t>(m, 1))));
}

double empirical_quantile(std::vector<double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

}  // namespace cmpp::stats
