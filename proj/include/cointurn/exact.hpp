#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "cointurn/schedule.hpp"

namespace cointurn {

// Signed step correlation e(i, j) = prod_{k=i+1}^{j} (1 - 2 p_k); e(i, i) = 1.
// Satisfies the cocycle e(i,j) e(j,k) = e(i,k) for i <= j <= k.
double correlation(const Schedule& s, std::uint64_t i, std::uint64_t j);

// P(step n is +1 | first step = y1) = 1/2 + (y1/2) prod_{k=2}^{n} (1 - 2 p_k).
double head_probability(const Schedule& s, std::uint64_t n, int y1);

// The infinite product prod_{i=2}^inf (1 - 2 p_i).
struct LimitingCorrelation {
    enum class Status {
        converged,    // truncated product, tail bound reported
        zero_mixing,  // mixing forces the product to 0
        undefined,    // sign keeps flipping forever: no limit
    };
    Status status = Status::undefined;
    double value = 0.0;
    double tail_bound = 0.0;
};
LimitingCorrelation limiting_correlation(const Schedule& s, double tol,
                                         std::uint64_t horizon = 1u << 20);

// Long-run law of the nth step conditioned on the first.
enum class ErgodicCase {
    half,       // P(Y_n = 1 | Y_1) -> 1/2
    rho_limit,  // -> (1 + y1 * rho)/2 with rho != 0
    no_limit,   // oscillates forever
};
struct ErgodicVerdict {
    ErgodicCase kind = ErgodicCase::half;
    double rho = 0.0;                      // meaningful for rho_limit
    std::uint64_t count_above_half = 0;    // #{i <= horizon : p_i > 1/2}
    double speed_proxy = 0.0;              // exp(-2 sum_{i<=horizon} min(p_i, q_i))
};
ErgodicVerdict ergodic_verdict(const Schedule& s, std::uint64_t horizon);

// One autocovariance-series coefficient, by direct summation:
//   coeff(n) = sum_{i>=0} e(n, n+i).
// Truncation policy is split by the sign pattern of the factors:
//   - factors all <= 0 (heating tail): alternating series, stop when
//     |term| < tol, which bounds the remainder;
//   - factors all >= 0 (cooling tail): positive terms, stop when both
//     term < tol*sum and the geometric tail proxy term/(2 p) < tol*sum;
//   - mixed signs: stop on |term| < tol with an empirical-rate bound.
// Signals divergent when partial sums pass 1e8, or when max_terms runs out
// on the positive-term path with no tail control.
struct MartingaleCoeff {
    enum class Status { converged, truncated, divergent };
    std::uint64_t n = 0;
    double value = 0.0;
    double error_bound = 0.0;
    bool converged = false;
    Status status = Status::truncated;
    std::uint64_t terms = 0;
};
MartingaleCoeff martingale_coeff(const Schedule& s, std::uint64_t n, double tol = 1e-10,
                                 std::uint64_t max_terms = 2'000'000);

struct CoefficientsDiverge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonDivergentVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Memoized tables of the series coefficients a_i, their error bounds, and the
// cumulative variance v_m = sum_{i<=m} 4 a_i^2 p_i q_i, for one schedule.
//
// Tables are filled by the backward identity a_i = 1 + (1 - 2 p_{i+1}) a_{i+1},
// seeded by the direct series at a horizon M where the cumulative damping
// prod |1 - 2 p_k| has fallen below tol/4; seed errors contract on the way
// down, so every stored entry carries a certified absolute bound. Entries are
// written once and never change afterwards; concurrent readers are safe.
class ExactCache {
public:
    explicit ExactCache(Schedule s, double tol = 1e-6);

    const Schedule& schedule() const { return sched_; }
    double tol() const { return tol_; }

    double a(std::uint64_t n);        // throws CoefficientsDiverge when unreliable
    double a_error(std::uint64_t n);  // certified absolute bound for a(n)
    double v(std::uint64_t m);        // v_0 = 0

    // Smallest n with v_n >= x. Throws NonDivergentVariance when v plateaus
    // below x or the search cap is reached.
    std::uint64_t time_change(double x, std::uint64_t max_n = 2'000'000);

private:
    void extend(std::uint64_t need);  // callers hold mu_

    Schedule sched_;
    double tol_;
    bool reliable_ = true;
    std::vector<double> a_;     // a_[0] unused
    std::vector<double> aerr_;
    std::vector<double> v_;     // v_[0] = 0
    std::mutex mu_;
};

// v_m through a transient cache.
double cumulative_variance(const Schedule& s, std::uint64_t m, double tol = 1e-6);

// Z(x) through a transient cache.
std::uint64_t time_change(const Schedule& s, double x, double tol = 1e-6,
                          std::uint64_t max_n = 2'000'000);

// Exact Var(S_n) in O(n) via the row-sum recursion
//   r_n = (1 + r_{n-1}) (1 - 2 p_n),   Var(S_n) = Var(S_{n-1}) + 1 + 2 r_n,
// with Var(S_1) = 1 (symmetric first step).
class VarianceRecursion {
public:
    explicit VarianceRecursion(Schedule s) : sched_(std::move(s)) {}

    void advance() {
        ++n_;
        row_sum_ = (1.0 + row_sum_) * (1.0 - 2.0 * sched_.prob(n_));
        var_ += 1.0 + 2.0 * row_sum_;
    }
    std::uint64_t n() const { return n_; }
    double variance() const { return var_; }
    double row_sum() const { return row_sum_; }

private:
    Schedule sched_;
    std::uint64_t n_ = 1;
    double row_sum_ = 0.0;
    double var_ = 1.0;
};

double walk_variance(const Schedule& s, std::uint64_t n);

struct MartingaleDiagnostics {
    std::uint64_t n = 0;
    double a = 0.0;
    double v = 0.0;
    double ratio = 0.0;  // a^2 / v
    double gap = 0.0;    // 1 - a
};
MartingaleDiagnostics martingale_diagnostics(ExactCache& cache, std::uint64_t n);

}  // namespace cointurn
