#include "cointurn/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "cointurn/rng.hpp"

namespace cointurn {

double WalkPath::value_at(double u) const {
    if (u < 0.0 || u > static_cast<double>(n) * (1.0 + 1e-12))
        throw HorizonExceeded("WalkPath::value_at: time outside [0, n]");
    const auto k = static_cast<std::uint64_t>(u);
    if (k >= n) return static_cast<double>(sums[n]);
    const double frac = u - static_cast<double>(k);
    return static_cast<double>(sums[k]) +
           frac * static_cast<double>(sums[k + 1] - sums[k]);
}

WalkPath sample_walk(const Schedule& s, std::uint64_t n, std::uint64_t seed,
                     std::optional<int> y1) {
    if (n < 1) throw std::invalid_argument("sample_walk: n >= 1");
    if (y1 && *y1 != 1 && *y1 != -1)
        throw std::invalid_argument("sample_walk: y1 in {-1,+1}");

    SplitMix64 g(seed);
    WalkPath w;
    w.n = n;
    w.seed = seed;
    w.turns.resize(n >= 2 ? n - 1 : 0);
    w.signs.resize(n);
    w.sums.resize(n + 1);

    int y = y1 ? *y1 : g.sign();
    w.signs[0] = static_cast<std::int8_t>(y);
    w.sums[0] = 0;
    w.sums[1] = y;
    for (std::uint64_t k = 2; k <= n; ++k) {
        const bool turn = g.bernoulli(s.prob(k));
        w.turns[k - 2] = turn ? 1 : 0;
        if (turn) y = -y;
        w.signs[k - 1] = static_cast<std::int8_t>(y);
        w.sums[k] = w.sums[k - 1] + y;
    }
    return w;
}

std::vector<Endpoint> sample_endpoints(const Schedule& s, std::uint64_t n,
                                       std::uint64_t trials, std::uint64_t seed,
                                       std::optional<int> y1) {
    if (n < 1) throw std::invalid_argument("sample_endpoints: n >= 1");
    if (y1 && *y1 != 1 && *y1 != -1)
        throw std::invalid_argument("sample_endpoints: y1 in {-1,+1}");

    std::vector<double> probs(n + 1, 0.0);
    for (std::uint64_t k = 2; k <= n; ++k) probs[k] = s.prob(k);

    std::vector<Endpoint> out(trials);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        SplitMix64 g(derive_seed(seed, trial));
        int y = y1 ? *y1 : g.sign();
        std::int64_t sum = y;
        for (std::uint64_t k = 2; k <= n; ++k) {
            if (g.uniform01() < probs[k]) y = -y;
            sum += y;
        }
        out[trial] = Endpoint{sum, static_cast<std::int8_t>(y)};
    }
    return out;
}

ExactDistribution::ExactDistribution(std::uint64_t n)
    : n_(n), table_(2 * (2 * n + 1), 0.0) {}

double ExactDistribution::prob(std::int64_t s, int y) const {
    if (s < -static_cast<std::int64_t>(n_) || s > static_cast<std::int64_t>(n_))
        return 0.0;
    return table_[2 * static_cast<std::size_t>(s + static_cast<std::int64_t>(n_)) +
                  (y > 0 ? 1 : 0)];
}

double& ExactDistribution::at(std::int64_t s, int y) {
    return table_[2 * static_cast<std::size_t>(s + static_cast<std::int64_t>(n_)) +
                  (y > 0 ? 1 : 0)];
}

double ExactDistribution::prob_s(std::int64_t s) const {
    return prob(s, -1) + prob(s, +1);
}

double ExactDistribution::prob_y_plus() const {
    double out = 0.0;
    for (std::size_t i = 1; i < table_.size(); i += 2) out += table_[i];
    return out;
}

double ExactDistribution::mass() const {
    double out = 0.0;
    for (double p : table_) out += p;
    return out;
}

double ExactDistribution::mean() const {
    double out = 0.0;
    const auto nn = static_cast<std::int64_t>(n_);
    for (std::int64_t s = -nn; s <= nn; ++s) out += static_cast<double>(s) * prob_s(s);
    return out;
}

double ExactDistribution::variance() const {
    const double mu = mean();
    double out = 0.0;
    const auto nn = static_cast<std::int64_t>(n_);
    for (std::int64_t s = -nn; s <= nn; ++s) {
        const double d = static_cast<double>(s) - mu;
        out += d * d * prob_s(s);
    }
    return out;
}

double ExactDistribution::total_variation(const ExactDistribution& other) const {
    if (other.n_ != n_)
        throw std::invalid_argument("total_variation: distributions at different n");
    double out = 0.0;
    for (std::size_t i = 0; i < table_.size(); ++i)
        out += std::fabs(table_[i] - other.table_[i]);
    return 0.5 * out;
}

std::vector<std::pair<std::int64_t, double>> ExactDistribution::s_marginal() const {
    std::vector<std::pair<std::int64_t, double>> out;
    const auto nn = static_cast<std::int64_t>(n_);
    for (std::int64_t s = -nn; s <= nn; s += 2) out.emplace_back(s, prob_s(s));
    return out;
}

namespace {

void enumerate_rec(const Schedule& s, std::uint64_t n, std::uint64_t k, int y,
                   std::int64_t sum, double prob, ExactDistribution& dist) {
    if (k == n) {
        dist.at(sum, y) += prob;
        return;
    }
    const double p = s.prob(k + 1);
    if (p > 0.0) enumerate_rec(s, n, k + 1, -y, sum - y, prob * p, dist);
    if (p < 1.0) enumerate_rec(s, n, k + 1, y, sum + y, prob * (1.0 - p), dist);
}

}  // namespace

ExactDistribution enumerated_distribution(const Schedule& s, std::uint64_t n,
                                          std::optional<int> y1) {
    if (n < 1) throw std::invalid_argument("enumerated_distribution: n >= 1");
    if (n > 22) throw TooLarge("enumerated_distribution: n must be <= 22");
    ExactDistribution dist(n);
    if (y1) {
        enumerate_rec(s, n, 1, *y1, *y1, 1.0, dist);
    } else {
        enumerate_rec(s, n, 1, +1, +1, 0.5, dist);
        enumerate_rec(s, n, 1, -1, -1, 0.5, dist);
    }
    return dist;
}

ExactDistribution dp_distribution(const Schedule& s, std::uint64_t n,
                                  std::optional<int> y1) {
    if (n < 1) throw std::invalid_argument("dp_distribution: n >= 1");
    if (n > 20000) throw TooLarge("dp_distribution: n must be <= 20000");

    ExactDistribution cur(n), nxt(n);
    if (y1) {
        cur.at(*y1, *y1) = 1.0;
    } else {
        cur.at(+1, +1) = 0.5;
        cur.at(-1, -1) = 0.5;
    }
    for (std::uint64_t k = 1; k < n; ++k) {
        const double p = s.prob(k + 1);
        const auto kk = static_cast<std::int64_t>(k);
        for (std::int64_t z = -kk; z <= kk; z += 2) {
            for (int y : {-1, +1}) {
                const double mass = cur.at(z, y);
                if (mass == 0.0) continue;
                nxt.at(z - y, -y) += mass * p;          // turn
                nxt.at(z + y, y) += mass * (1.0 - p);   // stay
                cur.at(z, y) = 0.0;
            }
        }
        std::swap(cur, nxt);
    }
    return cur;
}

RescaledPath rescaled_path(const WalkPath& w, const Schedule& s, RescaleMode mode,
                           const std::vector<double>& grid,
                           std::optional<std::uint64_t> scale, ExactCache* cache) {
    const std::uint64_t nscale = scale.value_or(w.n);
    if (nscale < 1) throw std::invalid_argument("rescaled_path: scale >= 1");

    RescaledPath out;
    out.mode = mode;
    out.samples.reserve(grid.size());

    ExactCache local(s);
    ExactCache* zc = cache ? cache : &local;

    for (double t : grid) {
        if (t < 0.0) throw std::invalid_argument("rescaled_path: t >= 0");
        const double x = static_cast<double>(nscale) * t;
        double value = 0.0;
        if (mode == RescaleMode::cooling) {
            value = w.value_at(x) / static_cast<double>(nscale);
        } else {
            const std::uint64_t z = zc->time_change(x);
            if (z > w.n)
                throw HorizonExceeded("rescaled_path: time change beyond the sampled path");
            value = static_cast<double>(w.sums[z]) /
                    std::sqrt(static_cast<double>(nscale));
        }
        out.samples.emplace_back(t, value);
    }
    return out;
}

double realized_variance(const WalkPath& w, const Schedule& s, std::uint64_t n,
                         ExactCache& cache) {
    if (n < 1 || n > w.n)
        throw std::invalid_argument("realized_variance: need 1 <= n <= path length");
    // xi_1 from the first sign; xi_i = 2 (p_i - W_i) afterwards
    double xi = static_cast<double>(w.signs[0]) + 2.0 * s.prob(1) - 1.0;
    double out = cache.a(1) * cache.a(1) * xi * xi;
    for (std::uint64_t i = 2; i <= n; ++i) {
        xi = 2.0 * (s.prob(i) - static_cast<double>(w.turns[i - 2]));
        const double ai = cache.a(i);
        out += ai * ai * xi * xi;
    }
    return out;
}

double truncated_second_moment(const Schedule& s, std::uint64_t n, double eps,
                               std::uint64_t trials, std::uint64_t seed, double tol) {
    if (n < 1) throw std::invalid_argument("truncated_second_moment: n >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("truncated_second_moment: eps > 0");
    if (trials < 1) throw std::invalid_argument("truncated_second_moment: trials >= 1");

    const double threshold = static_cast<double>(n) * eps;
    constexpr std::uint64_t kScanCap = 2'000'000;

    ExactCache cache(s, tol);
    std::uint64_t z = 0;
    bool z_known = true;
    try {
        z = cache.time_change(static_cast<double>(n), kScanCap);
    } catch (const NonDivergentVariance&) {
        z_known = false;
    }

    // Only indices with 4 a_i^2 > n*eps can contribute (|xi| <= 2).
    const std::uint64_t scan_to = z_known ? z : kScanCap;
    std::vector<std::uint64_t> fireable;
    for (std::uint64_t i = 1; i <= scan_to; ++i) {
        const double ai = cache.a(i);
        if (4.0 * ai * ai > threshold) fireable.push_back(i);
    }
    if (!z_known) {
        // Beyond the scan cap: once p stays >= 1/2 the coefficients obey the
        // alternating-series bound a in [0, 1], so 4 a^2 <= 4.
        if (!(s.min_prob_from(scan_to + 1) >= 0.5 && 4.0 <= threshold))
            throw HorizonExceeded(
                "truncated_second_moment: cannot bound the sum within the scan cap");
    }
    if (fireable.empty()) return 0.0;

    double total = 0.0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        SplitMix64 g(derive_seed(seed, trial));
        double sum = 0.0;
        for (std::uint64_t i : fireable) {
            const double p = s.prob(i);
            double xi;
            if (i == 1) {
                xi = static_cast<double>(g.sign()) + 2.0 * p - 1.0;
            } else {
                const double w = g.bernoulli(p) ? 1.0 : 0.0;
                xi = 2.0 * (p - w);
            }
            const double ai = cache.a(i);
            const double x2 = ai * ai * xi * xi;
            if (x2 > threshold) sum += x2;
        }
        total += sum / static_cast<double>(n);
    }
    return total / static_cast<double>(trials);
}

std::uint64_t zero_hits(const WalkPath& w) {
    std::uint64_t count = 0;
    for (std::uint64_t k = 1; k <= w.n; ++k)
        if (w.sums[k] == 0) ++count;
    return count;
}

}  // namespace cointurn
