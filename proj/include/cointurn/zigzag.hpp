#pragma once

#include <cstdint>
#include <vector>

#include "cointurn/schedule.hpp"

namespace cointurn {

// A realization of the Poisson point process with intensity c/x on (eps, T],
// as a finite strictly increasing multiset of atoms. The process explodes at
// zero, so the truncation level eps is mandatory and carried along.
struct PointMeasure {
    std::vector<double> atoms;  // strictly increasing, all in (eps, T]
    double epsilon = 0.0;
    double horizon = 0.0;   // T
    double intensity = 0.0;  // c
    std::uint64_t seed = 0;
};

// Samples the process by homogenizing in log time: atoms are
// x_k = T exp(-(G_1 + ... + G_k)) with G_i iid exponential of rate c, stopped
// at the first x_k <= eps. Expected atom count is c ln(T/eps).
PointMeasure sample_point_process(double c, double T, double eps, std::uint64_t seed);

// Value at r of the slope-alternating path assigned to the point measure,
// anchored to increase at t: the segment containing t (an atom exactly at t
// starts it) carries slope +1 and signs alternate across atoms in both
// directions. Mass in (0, eps] keeps the alternation of the last known atom
// and contributes at most eps of absolute error.
// Requires eps < t <= T and 0 <= r <= T. Always |value| <= r.
double anchored_path_value(const PointMeasure& pm, double t, double r);

// The continuum slope-±1 path: a point measure, a global fair sign, and the
// anchor convention "largest atom starts an increasing segment". Evaluable
// anywhere on [0, T]; 1-Lipschitz; |value(t)| <= t.
class ZigzagPath {
public:
    ZigzagPath(PointMeasure pm, int sign);

    double value(double t) const;
    // worst-case effect of the missing mass below eps
    double truncation_error(double t) const;
    // exact count of sign changes on [t0, t1] from the piecewise-linear
    // representation (interval arithmetic on segments, not grid scanning)
    std::uint64_t zero_crossings(double t0, double t1) const;

    const PointMeasure& points() const { return pm_; }
    int sign() const { return sign_; }

private:
    std::uint64_t segment_of(double t) const;
    int segment_slope(std::uint64_t j) const;

    PointMeasure pm_;
    int sign_;
    std::vector<double> vertex_;  // unsigned path value at each atom
};

// Fair global sign + point process from one seed.
ZigzagPath sample_zigzag(double c, double T, double eps, std::uint64_t seed);

// Number of walk turns in steps ceil(a n)+1 .. ceil(b n), one count per
// trial. The counts approach Poisson(c ln(b/a)) for critical schedules.
std::vector<std::uint64_t> turn_counts_in_window(const Schedule& s, std::uint64_t n,
                                                 double a, double b,
                                                 std::uint64_t trials,
                                                 std::uint64_t seed);

}  // namespace cointurn
