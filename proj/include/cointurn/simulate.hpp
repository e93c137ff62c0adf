#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cointurn/exact.hpp"
#include "cointurn/schedule.hpp"

namespace cointurn {

struct HorizonExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooLarge : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// One realization of the walk: turn indicators, step signs, partial sums.
// Invariants: sums[0] = 0, |sums[k] - sums[k-1]| = 1,
// signs[k-1] = signs[k-2] * (-1)^{turns[k-2]}, sums[k] = sums[k-1] + signs[k-1].
struct WalkPath {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> turns;  // turns[k-2] = W_k for k = 2..n
    std::vector<std::int8_t> signs;   // signs[k-1] = Y_k for k = 1..n
    std::vector<std::int64_t> sums;   // sums[k] = S_k for k = 0..n

    // S at real time u in [0, n], by linear interpolation.
    double value_at(double u) const;
};

// W_k ~ Bernoulli(p_k) independent; the first sign is y1 when given, else
// +/-1 with equal probability. Deterministic given (s, n, seed, y1).
WalkPath sample_walk(const Schedule& s, std::uint64_t n, std::uint64_t seed,
                     std::optional<int> y1 = {});

// Endpoint (S_n, Y_n) of one trial.
struct Endpoint {
    std::int64_t s = 0;
    std::int8_t y = 0;
};

// Endpoints of `trials` independent walks without materializing paths.
// Trial i uses the stream derive_seed(seed, i), so the output is independent
// of any batching or ordering of the trials.
std::vector<Endpoint> sample_endpoints(const Schedule& s, std::uint64_t n,
                                       std::uint64_t trials, std::uint64_t seed,
                                       std::optional<int> y1 = {});

// Exact joint law of (S_n, Y_n) at a fixed n.
class ExactDistribution {
public:
    explicit ExactDistribution(std::uint64_t n);

    std::uint64_t n() const { return n_; }
    double prob(std::int64_t s, int y) const;
    double& at(std::int64_t s, int y);
    double prob_s(std::int64_t s) const;  // marginal over the sign
    double prob_y_plus() const;           // P(Y_n = +1)
    double mass() const;
    double mean() const;
    double variance() const;
    double total_variation(const ExactDistribution& other) const;

    // Marginal pmf of S_n on its support, ascending.
    std::vector<std::pair<std::int64_t, double>> s_marginal() const;

private:
    std::uint64_t n_;
    std::vector<double> table_;  // [(s + n) * 2 + (y > 0)]
};

// Full enumeration of all 2^{n-1} turn patterns (times the first sign).
// Independent oracle; n <= 22.
ExactDistribution enumerated_distribution(const Schedule& s, std::uint64_t n,
                                          std::optional<int> y1 = {});

// Forward dynamic programming on the Markov state (S_k, Y_k); n <= 20000.
ExactDistribution dp_distribution(const Schedule& s, std::uint64_t n,
                                  std::optional<int> y1 = {});

enum class RescaleMode {
    cooling,    // S(scale * t) / scale, linear interpolation between steps
    diffusive,  // S_{Z(scale * t)} / sqrt(scale)
};

struct RescaledPath {
    RescaleMode mode = RescaleMode::cooling;
    std::vector<std::pair<double, double>> samples;  // (t, value)
};

// Evaluate the rescaled walk on a t-grid. `scale` defaults to w.n. Throws
// HorizonExceeded when the grid reaches past the sampled path.
RescaledPath rescaled_path(const WalkPath& w, const Schedule& s, RescaleMode mode,
                           const std::vector<double>& grid,
                           std::optional<std::uint64_t> scale = {},
                           ExactCache* cache = nullptr);

// Realized quadratic variation sum_{i<=n} a_i^2 xi_i^2 along the path, where
// xi_i is the centered turn sign.
double realized_variance(const WalkPath& w, const Schedule& s, std::uint64_t n,
                         ExactCache& cache);

// Monte Carlo mean of (1/n) sum_{i<=Z(n)} X_i^2 1{X_i^2 > n*eps} with
// X_i = a_i xi_i Y_{i-1}. Returns exactly 0 (no sampling) when no index up to
// Z(n) can clear the threshold; for heating-type schedules whose Z(n) lies
// beyond the scan cap this is certified through the alternating-series bound
// a_i in [0,1] once p stays >= 1/2.
double truncated_second_moment(const Schedule& s, std::uint64_t n, double eps,
                               std::uint64_t trials, std::uint64_t seed,
                               double tol = 1e-6);

// Number of k in [1, n] with S_k = 0.
std::uint64_t zero_hits(const WalkPath& w);

}  // namespace cointurn
