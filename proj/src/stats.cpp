#include "cointurn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cointurn::stats {

namespace {

// Continued fraction for the incomplete beta, evaluated with the modified
// Lentz algorithm. Converges best for x < (alpha+1)/(alpha+beta+2); the
// caller applies the symmetry transform for the other half.
double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kTiny = 1e-30;
    constexpr double kEps = 1e-15;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double num = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h;
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

double beta_cdf(double alpha, double beta, double x) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("beta_cdf: shape parameters must be positive");
    if (x < 0.0 || x > 1.0)
        throw std::invalid_argument("beta_cdf: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double front =
        std::exp(alpha * std::log(x) + beta * std::log1p(-x) - log_beta(alpha, beta));
    if (x < (alpha + 1.0) / (alpha + beta + 2.0))
        return front * beta_cont_frac(alpha, beta, x) / alpha;
    const double front_sym =
        std::exp(beta * std::log1p(-x) + alpha * std::log(x) - log_beta(beta, alpha));
    return 1.0 - front_sym * beta_cont_frac(beta, alpha, 1.0 - x) / beta;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
    std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_one(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    return d;
}

double ks_two(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double poisson_pmf(double mu, std::uint64_t k) {
    if (!(mu > 0.0)) throw std::invalid_argument("poisson_pmf: mu must be positive");
    const double kk = static_cast<double>(k);
    return std::exp(kk * std::log(mu) - mu - std::lgamma(kk + 1.0));
}

double tv_to_poisson(const std::vector<std::uint64_t>& counts, double mu) {
    if (counts.empty()) throw std::invalid_argument("tv_to_poisson: empty sample");
    std::uint64_t kmax = 0;
    for (auto c : counts) kmax = std::max(kmax, c);

    std::vector<double> emp(kmax + 1, 0.0);
    const double inv = 1.0 / static_cast<double>(counts.size());
    for (auto c : counts) emp[c] += inv;

    double tv = 0.0;
    double pmf_mass = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        const double p = poisson_pmf(mu, k);
        pmf_mass += p;
        tv += std::fabs(emp[k] - p);
    }
    tv += 1.0 - pmf_mass;  // Poisson tail beyond the observed range
    return 0.5 * tv;
}

}  // namespace cointurn::stats
