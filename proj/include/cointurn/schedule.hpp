#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cointurn {

// Rule for evaluating a custom table beyond its last entry.
struct Tail {
    enum class Kind { constant, last };
    Kind kind = Kind::constant;
    double value = 0.5;  // used when kind == constant

    static Tail constant(double v) { return Tail{Kind::constant, v}; }
    static Tail last() { return Tail{Kind::last, 0.5}; }
};

// A turning-probability sequence n -> p_n in [0, 1]. p_1 is the `first`
// probability (1/2 by default, which symmetrizes the first step); family
// formulas apply from n >= max(2, n0) and fall back to 1/2 below n0.
// Formulas are clamped into [0, 1], so prob() is total on n >= 1.
//
// Immutable value type; evaluation is pure and thread-safe.
class Schedule {
public:
    enum class Family {
        constant,
        power_cooling,     // p_n = a / n^gamma,        gamma in (0,1)
        critical_cooling,  // p_n = c / n
        harmonic_heating,  // p_n = 1 - c / n
        power_heating,     // p_n = 1 - c / (2 n^gamma), gamma in (0,1)
        even_odd,          // delegates to two sub-schedules by parity of n
        factorial_blocks,  // p_i = ln(k) / (2 k!) on the block k! < i <= (k+1)!
        reciprocal,        // p_n = 1 / (n + 1); endpoint law is discrete uniform
        custom_table,      // explicit values for p_2, p_3, ... plus a tail rule
    };

    static Schedule constant(double c, double first = 0.5);
    static Schedule power_cooling(double a, double gamma, std::uint64_t n0 = 1,
                                  double first = 0.5);
    static Schedule critical_cooling(double c, std::uint64_t n0 = 1, double first = 0.5);
    static Schedule harmonic_heating(double c, std::uint64_t n0 = 1, double first = 0.5);
    static Schedule power_heating(double c, double gamma, std::uint64_t n0 = 1,
                                  double first = 0.5);
    static Schedule even_odd(Schedule even_rule, Schedule odd_rule, double first = 0.5);
    static Schedule factorial_blocks(double first = 0.5);
    static Schedule reciprocal(double first = 0.5);
    // values[i] is p_{i+2}; p_1 comes from `first`.
    static Schedule custom_table(std::vector<double> values, Tail tail = Tail::last(),
                                 double first = 0.5);

    // p_n; total on n >= 1, always in [0, 1].
    double prob(std::uint64_t n) const;
    // q_n = 1 - p_n, exactly.
    double q(std::uint64_t n) const { return 1.0 - prob(n); }
    // A_n = n * p_n.
    double turn_rate(std::uint64_t n) const {
        return static_cast<double>(n) * prob(n);
    }

    Family family() const { return family_; }
    double first() const { return first_; }
    double param_a() const { return a_; }
    double param_gamma() const { return gamma_; }
    std::uint64_t param_n0() const { return n0_; }
    const Schedule* even_rule() const { return even_.get(); }
    const Schedule* odd_rule() const { return odd_.get(); }
    const std::vector<double>& table() const { return table_; }
    Tail tail() const { return tail_; }

    // A valid lower bound on inf_{j >= n} p_j, possibly conservative (0 is
    // always sound). Used to certify alternating-series bounds on tails.
    double min_prob_from(std::uint64_t n) const;

    // First index beyond which p is exactly 0 or exactly 1 forever, when the
    // family guarantees it (custom tables with a trivial tail). 0 = none.
    std::uint64_t trivial_tail_start() const;

    // Canonical key=value description, also accepted by schedule_from_config.
    std::string describe() const;

private:
    Schedule() = default;

    Family family_ = Family::constant;
    double first_ = 0.5;
    double a_ = 0.5;       // c or a, by family
    double gamma_ = 0.5;   // power families
    std::uint64_t n0_ = 1;
    std::shared_ptr<const Schedule> even_, odd_;
    std::vector<double> table_;
    Tail tail_;
};

enum class MixingVerdict { mixing, non_mixing, undetermined };

enum class Regime {
    lower_supercritical,  // sum p_n < inf: finitely many turns
    strongly_critical,    // n p_n -> 0 but sum p_n = inf
    critical_cooling,     // n p_n -> c > 0
    subcritical_cooling,  // p_n -> 0, n p_n increases to inf
    bounded_band,         // 0 < liminf p <= limsup p < 1
    heating,              // p_n -> 1, sum q_n = inf
    upper_supercritical,  // sum q_n < inf
    irregular,            // no band with proven behavior applies
};

struct ScheduleDiagnostics {
    std::uint64_t horizon = 0;
    double sum_p = 0.0;
    double sum_q = 0.0;
    double sum_min_pq = 0.0;
    double turn_rate_at_horizon = 0.0;  // A_n at n = horizon
};

struct RegimeVerdict {
    MixingVerdict mixing = MixingVerdict::undetermined;
    Regime regime = Regime::irregular;
    ScheduleDiagnostics diagnostics;
};

// Classify a schedule. Closed-form families are classified analytically;
// custom tables and even/odd composites use partial-sum diagnostics up to
// the horizon and may return undetermined. `mixing` is declared only when
// the family rule implies sum min(p,q) = inf, or the partial sum passes the
// divergence witness with a recognized pattern.
RegimeVerdict classify(const Schedule& s, std::uint64_t horizon);

const char* to_string(MixingVerdict v);
const char* to_string(Regime r);

// Parse "kind=...,k=v,..." (or whitespace/newline separated). Unknown keys
// are rejected. Custom tables accept csv=<path> with (n, p_n) rows and
// tail=constant:<v> or tail=last; even/odd rules use "even." / "odd."
// prefixed keys.
Schedule schedule_from_config(const std::string& text);

}  // namespace cointurn
