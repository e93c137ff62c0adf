#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace cointurn::stats {

// Regularized incomplete beta I_x(alpha, beta) by continued fraction
// (modified Lentz, 300 iterations cap). Absolute error <= 1e-10 for
// shape parameters up to ~50. Throws std::invalid_argument on
// non-positive shapes or x outside [0, 1].
double beta_cdf(double alpha, double beta, double x);

// Standard normal CDF via erfc; absolute error <= 1e-9.
double normal_cdf(double x);

// Empirical CDF over a sorted copy of the sample. Right-continuous step
// function from 0 to 1.
class Ecdf {
public:
    explicit Ecdf(std::vector<double> values);

    double operator()(double x) const;
    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

// One-sample Kolmogorov-Smirnov statistic: sup |F_n - F| over the sample.
double ks_one(std::vector<double> sample, const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov statistic: sup |F_n - G_m|.
double ks_two(std::vector<double> a, std::vector<double> b);

// Poisson pmf computed in log space for stability.
double poisson_pmf(double mu, std::uint64_t k);

// Total-variation distance between the empirical law of `counts` and
// Poisson(mu), including the Poisson mass beyond the observed range.
double tv_to_poisson(const std::vector<std::uint64_t>& counts, double mu);

}  // namespace cointurn::stats
