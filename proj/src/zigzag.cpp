#include "cointurn/zigzag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cointurn/rng.hpp"

namespace cointurn {

PointMeasure sample_point_process(double c, double T, double eps, std::uint64_t seed) {
    if (!(c > 0.0)) throw std::invalid_argument("sample_point_process: c > 0");
    if (!(eps > 0.0 && eps < T))
        throw std::invalid_argument("sample_point_process: need 0 < eps < T");

    SplitMix64 g(seed);
    PointMeasure pm;
    pm.epsilon = eps;
    pm.horizon = T;
    pm.intensity = c;
    pm.seed = seed;

    double x = T;
    while (true) {
        x *= std::exp(-g.exponential(c));
        if (x <= eps) break;
        pm.atoms.push_back(x);
    }
    std::reverse(pm.atoms.begin(), pm.atoms.end());
    return pm;
}

namespace {

// Segment j is [b_j, b_{j+1}) with b_0 = 0, b_j = atoms[j-1], b_{m+1} = T.
// The segment containing t has index = number of atoms <= t.
std::uint64_t segment_index(const std::vector<double>& atoms, double t) {
    return static_cast<std::uint64_t>(
        std::upper_bound(atoms.begin(), atoms.end(), t) - atoms.begin());
}

}  // namespace

double anchored_path_value(const PointMeasure& pm, double t, double r) {
    if (!(t > pm.epsilon && t <= pm.horizon))
        throw std::invalid_argument("anchored_path_value: anchor outside (eps, T]");
    if (!(r >= 0.0 && r <= pm.horizon))
        throw std::invalid_argument("anchored_path_value: r outside [0, T]");

    const auto& xs = pm.atoms;
    const std::uint64_t m = xs.size();
    const std::uint64_t ka = segment_index(xs, t);

    double acc = 0.0;
    for (std::uint64_t j = 0; j <= m; ++j) {
        const double lo = (j == 0) ? 0.0 : xs[j - 1];
        if (lo >= r) break;
        const double hi = (j < m) ? xs[j] : pm.horizon;
        const double len = std::min(hi, r) - lo;
        const std::uint64_t parity = (ka >= j ? ka - j : j - ka) & 1u;
        acc += parity ? -len : len;
    }
    return acc;
}

ZigzagPath::ZigzagPath(PointMeasure pm, int sign) : pm_(std::move(pm)), sign_(sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("ZigzagPath: sign in {-1,+1}");
    vertex_.resize(pm_.atoms.size());
    double v = 0.0, prev = 0.0;
    for (std::uint64_t j = 0; j < pm_.atoms.size(); ++j) {
        v += segment_slope(j) * (pm_.atoms[j] - prev);
        vertex_[j] = v;
        prev = pm_.atoms[j];
    }
}

int ZigzagPath::segment_slope(std::uint64_t j) const {
    // anchored at the largest atom: its segment (index m) has slope +1
    const std::uint64_t m = pm_.atoms.size();
    return ((m - j) & 1u) ? -1 : 1;
}

std::uint64_t ZigzagPath::segment_of(double t) const {
    return segment_index(pm_.atoms, t);
}

double ZigzagPath::value(double t) const {
    if (!(t >= 0.0 && t <= pm_.horizon * (1.0 + 1e-12)))
        throw std::invalid_argument("ZigzagPath::value: t outside [0, T]");
    const std::uint64_t j = segment_of(t);
    const double base = (j == 0) ? 0.0 : vertex_[j - 1];
    const double lo = (j == 0) ? 0.0 : pm_.atoms[j - 1];
    return static_cast<double>(sign_) * (base + segment_slope(j) * (t - lo));
}

double ZigzagPath::truncation_error(double t) const {
    return std::min(t, pm_.epsilon);
}

std::uint64_t ZigzagPath::zero_crossings(double t0, double t1) const {
    if (!(t0 >= 0.0 && t0 < t1 && t1 <= pm_.horizon))
        throw std::invalid_argument("zero_crossings: need 0 <= t0 < t1 <= T");

    std::uint64_t count = 0;
    int prev_sign = 0;
    const auto visit = [&](double t) {
        const double v = value(t);
        const int sg = (v > 0.0) - (v < 0.0);
        if (sg == 0) return;
        if (prev_sign != 0 && sg != prev_sign) ++count;
        prev_sign = sg;
    };
    visit(t0);
    const auto lo = std::upper_bound(pm_.atoms.begin(), pm_.atoms.end(), t0);
    for (auto it = lo; it != pm_.atoms.end() && *it < t1; ++it) visit(*it);
    visit(t1);
    return count;
}

ZigzagPath sample_zigzag(double c, double T, double eps, std::uint64_t seed) {
    SplitMix64 g(seed);
    const int w = g.sign();
    PointMeasure pm = sample_point_process(c, T, eps, g.next());
    pm.seed = seed;
    return ZigzagPath(std::move(pm), w);
}

std::vector<std::uint64_t> turn_counts_in_window(const Schedule& s, std::uint64_t n,
                                                 double a, double b,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed) {
    if (!(a > 0.0 && a < b)) throw std::invalid_argument("turn_counts_in_window: 0 < a < b");
    const auto k0 = static_cast<std::uint64_t>(
                        std::ceil(a * static_cast<double>(n))) + 1;
    const auto k1 = static_cast<std::uint64_t>(std::ceil(b * static_cast<double>(n)));
    if (k1 < k0) throw std::invalid_argument("turn_counts_in_window: empty step window");

    std::vector<double> probs(k1 - k0 + 1);
    for (std::uint64_t k = k0; k <= k1; ++k) probs[k - k0] = s.prob(k);

    std::vector<std::uint64_t> out(trials, 0);
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        SplitMix64 g(derive_seed(seed, trial));
        std::uint64_t count = 0;
        for (double p : probs)
            if (g.uniform01() < p) ++count;
        out[trial] = count;
    }
    return out;
}

}  // namespace cointurn
