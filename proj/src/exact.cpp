#include "cointurn/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cointurn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double correlation(const Schedule& s, std::uint64_t i, std::uint64_t j) {
    if (i < 1 || j < i) throw std::invalid_argument("correlation: need 1 <= i <= j");
    double prod = 1.0;
    for (std::uint64_t k = i + 1; k <= j; ++k) prod *= 1.0 - 2.0 * s.prob(k);
    return prod;
}

double head_probability(const Schedule& s, std::uint64_t n, int y1) {
    if (n < 1) throw std::invalid_argument("head_probability: n >= 1");
    if (y1 != 1 && y1 != -1) throw std::invalid_argument("head_probability: y1 in {-1,+1}");
    return 0.5 + 0.5 * static_cast<double>(y1) * correlation(s, 1, n);
}

LimitingCorrelation limiting_correlation(const Schedule& s, double tol,
                                         std::uint64_t horizon) {
    if (!(tol > 0.0)) throw std::invalid_argument("limiting_correlation: tol > 0");

    const RegimeVerdict rv = classify(s, horizon);
    if (rv.mixing == MixingVerdict::mixing)
        return {LimitingCorrelation::Status::zero_mixing, 0.0, 0.0};

    // p_i > 1/2 still occurring in the upper half of the horizon: the sign of
    // the product keeps flipping, so no limit exists.
    for (std::uint64_t i = horizon; i > horizon / 2; --i)
        if (s.prob(i) > 0.5)
            return {LimitingCorrelation::Status::undefined, kNaN, kInf};

    double prod = 1.0;
    std::uint64_t k = 1;
    std::uint64_t block = 64;
    constexpr std::uint64_t kCap = 1u << 24;
    while (k < kCap) {
        const double before = prod;
        const std::uint64_t stop = std::min<std::uint64_t>(k + block, kCap);
        for (++k; k <= stop; ++k) prod *= 1.0 - 2.0 * s.prob(k);
        k = stop;
        const double delta = std::fabs(prod - before);
        if (delta <= tol * std::max(std::fabs(prod), 1e-12))
            return {LimitingCorrelation::Status::converged, prod, delta};
        block *= 2;
    }
    return {LimitingCorrelation::Status::undefined, kNaN, kInf};
}

ErgodicVerdict ergodic_verdict(const Schedule& s, std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("ergodic_verdict: horizon >= 1");

    ErgodicVerdict out;
    double sum_min = 0.0;
    double prod_min = 1.0;
    bool any_half = false;
    bool above_in_top_half = false;
    for (std::uint64_t i = 2; i <= horizon; ++i) {
        const double p = s.prob(i);
        const double m = std::min(p, 1.0 - p);
        sum_min += m;
        prod_min *= 1.0 - 2.0 * m;
        if (p == 0.5) any_half = true;
        if (p > 0.5) {
            ++out.count_above_half;
            if (i > horizon / 2) above_in_top_half = true;
        }
    }
    out.speed_proxy = std::exp(-2.0 * sum_min);

    const RegimeVerdict rv = classify(s, horizon);
    if (rv.mixing == MixingVerdict::mixing || any_half) {
        out.kind = ErgodicCase::half;
        out.rho = 0.0;
        return out;
    }
    if (rv.mixing == MixingVerdict::undetermined && prod_min < 1e-9) {
        out.kind = ErgodicCase::half;
        out.rho = 0.0;
        return out;
    }
    if (above_in_top_half) {
        out.kind = ErgodicCase::no_limit;
        out.rho = kNaN;
        return out;
    }
    out.kind = ErgodicCase::rho_limit;
    out.rho = limiting_correlation(s, 1e-12, horizon).value;
    return out;
}

MartingaleCoeff martingale_coeff(const Schedule& s, std::uint64_t n, double tol,
                                 std::uint64_t max_terms) {
    if (n < 1) throw std::invalid_argument("martingale_coeff: n >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("martingale_coeff: tol > 0");

    constexpr double kDivergeCap = 1e8;
    MartingaleCoeff out;
    out.n = n;

    double sum = 1.0;
    double term = 1.0;
    bool all_nonneg = true;
    bool all_nonpos = true;

    // lagged |term| for the mixed-sign empirical decay rate
    constexpr std::uint64_t kLag = 32;
    double lag_buf[kLag];
    for (auto& x : lag_buf) x = 1.0;

    for (std::uint64_t i = 1; i <= max_terms; ++i) {
        const std::uint64_t k = n + i;
        const double p = s.prob(k);
        const double f = 1.0 - 2.0 * p;
        if (f > 0.0) all_nonpos = false;
        if (f < 0.0) all_nonneg = false;
        term *= f;
        sum += term;
        out.terms = i;

        if (term == 0.0) {  // a factor vanished: the tail is exactly zero
            out.value = sum;
            out.error_bound = 0.0;
            out.status = MartingaleCoeff::Status::converged;
            out.converged = true;
            return out;
        }
        const double at = std::fabs(term);
        if (sum > kDivergeCap) {
            out.value = sum;
            out.error_bound = kInf;
            out.status = MartingaleCoeff::Status::divergent;
            return out;
        }

        if (all_nonpos) {
            // strict alternation: remainder bounded by the next term
            if (at <= tol) {
                out.value = sum;
                out.error_bound = at;
                out.status = MartingaleCoeff::Status::converged;
                out.converged = true;
                return out;
            }
        } else if (all_nonneg) {
            const double gbound = (p > 0.0) ? term / (2.0 * p) : kInf;
            if (at <= tol * sum && gbound <= tol * sum) {
                out.value = sum;
                out.error_bound = gbound;
                out.status = MartingaleCoeff::Status::converged;
                out.converged = true;
                return out;
            }
        } else {
            const double lagged = lag_buf[i % kLag];
            lag_buf[i % kLag] = at;
            if (i > kLag && at <= tol && at <= 0.5 * lagged) {
                const double rate = std::pow(at / lagged, 1.0 / static_cast<double>(kLag));
                out.value = sum;
                out.error_bound = at * rate / (1.0 - rate);
                out.status = MartingaleCoeff::Status::converged;
                out.converged = true;
                return out;
            }
        }
    }

    out.value = sum;
    if (all_nonneg) {
        // positive terms exhausted the budget with no tail control
        out.error_bound = kInf;
        out.status = MartingaleCoeff::Status::divergent;
    } else {
        out.error_bound = all_nonpos ? std::fabs(term) : kInf;
        out.status = MartingaleCoeff::Status::truncated;
    }
    return out;
}

ExactCache::ExactCache(Schedule s, double tol) : sched_(std::move(s)), tol_(tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("ExactCache: tol > 0");
    a_.assign(1, 0.0);
    aerr_.assign(1, 0.0);
    v_.assign(1, 0.0);
}

void ExactCache::extend(std::uint64_t need) {
    const std::uint64_t have = a_.size() - 1;
    if (need <= have) return;
    const std::uint64_t target = std::max<std::uint64_t>({need, 2 * have, 64});

    // Pick the seed horizon M: walk the damping product until it certifies
    // that any O(1)-relative seed error is squeezed below tol at `target`.
    const std::uint64_t scan_cap = 64 * target + (1u << 22);
    double damping = 1.0;
    std::uint64_t M = target;
    while (damping > 0.25 * tol_ && M < scan_cap) {
        ++M;
        damping *= std::fabs(1.0 - 2.0 * sched_.prob(M));
    }

    double seed, seed_err;
    if (damping == 0.0) {
        // a zero factor makes everything below it exact regardless of seed
        seed = 1.0;
        seed_err = 2.0;
    } else {
        const MartingaleCoeff mc = martingale_coeff(sched_, M, 0.25, 2'000'000);
        if (mc.status == MartingaleCoeff::Status::divergent) {
            reliable_ = false;
            a_.resize(target + 1, kNaN);
            aerr_.resize(target + 1, kInf);
            v_.resize(target + 1, kNaN);
            return;
        }
        seed = mc.value;
        seed_err = mc.error_bound;
    }

    a_.resize(target + 1, 0.0);
    aerr_.resize(target + 1, 0.0);
    double a_val = seed;
    double err = seed_err;
    for (std::uint64_t k = M; k-- > have + 1;) {
        const double f = 1.0 - 2.0 * sched_.prob(k + 1);
        a_val = 1.0 + f * a_val;
        err *= std::fabs(f);
        if (k <= target) {
            a_[k] = a_val;
            aerr_[k] = err;
        }
    }

    v_.resize(target + 1, 0.0);
    for (std::uint64_t i = have + 1; i <= target; ++i) {
        const double p = sched_.prob(i);
        v_[i] = v_[i - 1] + 4.0 * a_[i] * a_[i] * p * (1.0 - p);
    }
}

double ExactCache::a(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("ExactCache::a: n >= 1");
    std::lock_guard lock(mu_);
    extend(n);
    if (!reliable_ || std::isnan(a_[n]))
        throw CoefficientsDiverge("series coefficients diverge for this schedule");
    return a_[n];
}

double ExactCache::a_error(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("ExactCache::a_error: n >= 1");
    std::lock_guard lock(mu_);
    extend(n);
    return aerr_[n];
}

double ExactCache::v(std::uint64_t m) {
    std::lock_guard lock(mu_);
    extend(m);
    if (m > 0 && (!reliable_ || std::isnan(v_[m])))
        throw CoefficientsDiverge("series coefficients diverge for this schedule");
    return v_[m];
}

std::uint64_t ExactCache::time_change(double x, std::uint64_t max_n) {
    if (!(x >= 0.0)) throw std::invalid_argument("time_change: x >= 0");
    std::lock_guard lock(mu_);
    extend(64);
    if (!reliable_)
        throw CoefficientsDiverge("series coefficients diverge for this schedule");
    while (v_.back() < x) {
        const std::uint64_t have = a_.size() - 1;
        if (have >= max_n)
            throw NonDivergentVariance("cumulative variance stayed below target");
        const double before = v_.back();
        extend(std::min<std::uint64_t>(2 * have, max_n));
        if (!reliable_)
            throw CoefficientsDiverge("series coefficients diverge for this schedule");
        // plateau: doubling the horizon moved v by a negligible amount
        if (v_.back() < x && v_.back() - before < 1e-15 * std::max(x, 1.0))
            throw NonDivergentVariance("cumulative variance plateaus below target");
    }
    const auto it = std::lower_bound(v_.begin() + 1, v_.end(), x);
    return static_cast<std::uint64_t>(it - v_.begin());
}

double cumulative_variance(const Schedule& s, std::uint64_t m, double tol) {
    ExactCache cache(s, tol);
    return cache.v(m);
}

std::uint64_t time_change(const Schedule& s, double x, double tol, std::uint64_t max_n) {
    ExactCache cache(s, tol);
    return cache.time_change(x, max_n);
}

double walk_variance(const Schedule& s, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("walk_variance: n >= 1");
    VarianceRecursion rec(s);
    while (rec.n() < n) rec.advance();
    return rec.variance();
}

MartingaleDiagnostics martingale_diagnostics(ExactCache& cache, std::uint64_t n) {
    MartingaleDiagnostics d;
    d.n = n;
    d.a = cache.a(n);
    d.v = cache.v(n);
    d.ratio = d.a * d.a / d.v;
    d.gap = 1.0 - d.a;
    return d;
}

}  // namespace cointurn
