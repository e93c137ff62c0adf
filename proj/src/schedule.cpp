#include "cointurn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace cointurn {

namespace {

void check_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

void check_open_unit(double v, const char* what) {
    if (!(v > 0.0 && v < 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
}

void check_positive(double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

Schedule Schedule::constant(double c, double first) {
    check_open_unit(c, "constant: c");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::constant;
    s.a_ = c;
    s.first_ = first;
    return s;
}

Schedule Schedule::power_cooling(double a, double gamma, std::uint64_t n0, double first) {
    check_positive(a, "power_cooling: a");
    check_open_unit(gamma, "power_cooling: gamma");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::power_cooling;
    s.a_ = a;
    s.gamma_ = gamma;
    s.n0_ = std::max<std::uint64_t>(n0, 1);
    s.first_ = first;
    return s;
}

Schedule Schedule::critical_cooling(double c, std::uint64_t n0, double first) {
    check_positive(c, "critical_cooling: c");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::critical_cooling;
    s.a_ = c;
    s.n0_ = std::max<std::uint64_t>(n0, 1);
    s.first_ = first;
    return s;
}

Schedule Schedule::harmonic_heating(double c, std::uint64_t n0, double first) {
    check_positive(c, "harmonic_heating: c");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::harmonic_heating;
    s.a_ = c;
    s.n0_ = std::max<std::uint64_t>(n0, 1);
    s.first_ = first;
    return s;
}

Schedule Schedule::power_heating(double c, double gamma, std::uint64_t n0, double first) {
    check_positive(c, "power_heating: c");
    check_open_unit(gamma, "power_heating: gamma");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::power_heating;
    s.a_ = c;
    s.gamma_ = gamma;
    s.n0_ = std::max<std::uint64_t>(n0, 1);
    s.first_ = first;
    return s;
}

Schedule Schedule::even_odd(Schedule even_rule, Schedule odd_rule, double first) {
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::even_odd;
    s.even_ = std::make_shared<const Schedule>(std::move(even_rule));
    s.odd_ = std::make_shared<const Schedule>(std::move(odd_rule));
    s.first_ = first;
    return s;
}

Schedule Schedule::factorial_blocks(double first) {
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::factorial_blocks;
    s.first_ = first;
    return s;
}

Schedule Schedule::reciprocal(double first) {
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::reciprocal;
    s.first_ = first;
    return s;
}

Schedule Schedule::custom_table(std::vector<double> values, Tail tail, double first) {
    for (double v : values) check_unit(v, "custom_table: value");
    if (tail.kind == Tail::Kind::constant) check_unit(tail.value, "custom_table: tail");
    check_unit(first, "first");
    Schedule s;
    s.family_ = Family::custom_table;
    s.table_ = std::move(values);
    s.tail_ = tail;
    s.first_ = first;
    return s;
}

double Schedule::prob(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("Schedule::prob: index starts at 1");
    if (n == 1) return first_;

    switch (family_) {
        case Family::constant:
            return a_;
        case Family::power_cooling:
            if (n < n0_) return 0.5;
            return std::min(a_ / std::pow(static_cast<double>(n), gamma_), 1.0);
        case Family::critical_cooling:
            if (n < n0_) return 0.5;
            return std::min(a_ / static_cast<double>(n), 1.0);
        case Family::harmonic_heating:
            if (n < n0_) return 0.5;
            return std::max(1.0 - a_ / static_cast<double>(n), 0.0);
        case Family::power_heating:
            if (n < n0_) return 0.5;
            return std::max(1.0 - a_ / (2.0 * std::pow(static_cast<double>(n), gamma_)), 0.0);
        case Family::even_odd:
            return (n % 2 == 0) ? even_->prob(n) : odd_->prob(n);
        case Family::factorial_blocks: {
            // block k! < n <= (k+1)! gets the constant ln(k) / (2 k!)
            std::uint64_t k = 1, fk = 1;
            while (fk > std::numeric_limits<std::uint64_t>::max() / (k + 1) ||
                   n > fk * (k + 1)) {
                if (fk > std::numeric_limits<std::uint64_t>::max() / (k + 1)) break;
                fk *= (k + 1);
                ++k;
            }
            if (k == 1) return 0.0;  // ln(1) = 0
            return std::log(static_cast<double>(k)) / (2.0 * static_cast<double>(fk));
        }
        case Family::reciprocal:
            return 1.0 / (static_cast<double>(n) + 1.0);
        case Family::custom_table: {
            const std::uint64_t idx = n - 2;
            if (idx < table_.size()) return table_[idx];
            if (tail_.kind == Tail::Kind::constant) return tail_.value;
            return table_.empty() ? 0.5 : table_.back();
        }
    }
    return 0.5;
}

double Schedule::min_prob_from(std::uint64_t n) const {
    const double head = (n <= 1) ? first_ : 1.0;
    const std::uint64_t lo = std::max<std::uint64_t>(n, 2);
    switch (family_) {
        case Family::constant:
            return std::min(head, a_);
        case Family::power_cooling:
        case Family::critical_cooling:
        case Family::reciprocal:
        case Family::factorial_blocks:
            return 0.0;
        case Family::harmonic_heating:
        case Family::power_heating: {
            // formula is nondecreasing in n; minimum sits at the first
            // formula index, with 1/2 below n0
            double m = head;
            if (lo < n0_) m = std::min(m, 0.5);
            m = std::min(m, prob(std::max(lo, n0_)));
            return m;
        }
        case Family::even_odd:
            return std::min({head, even_->min_prob_from(lo), odd_->min_prob_from(lo)});
        case Family::custom_table: {
            double m = head;
            for (std::uint64_t idx = (lo >= 2 ? lo - 2 : 0); idx < table_.size(); ++idx)
                m = std::min(m, table_[idx]);
            if (tail_.kind == Tail::Kind::constant)
                m = std::min(m, tail_.value);
            else
                m = std::min(m, table_.empty() ? 0.5 : table_.back());
            return m;
        }
    }
    return 0.0;
}

std::string Schedule::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::constant:
            os << "kind=constant,c=" << fmt(a_);
            break;
        case Family::power_cooling:
            os << "kind=power_cooling,a=" << fmt(a_) << ",gamma=" << fmt(gamma_)
               << ",n0=" << n0_;
            break;
        case Family::critical_cooling:
            os << "kind=critical_cooling,c=" << fmt(a_) << ",n0=" << n0_;
            break;
        case Family::harmonic_heating:
            os << "kind=harmonic_heating,c=" << fmt(a_) << ",n0=" << n0_;
            break;
        case Family::power_heating:
            os << "kind=power_heating,c=" << fmt(a_) << ",gamma=" << fmt(gamma_)
               << ",n0=" << n0_;
            break;
        case Family::even_odd: {
            std::string ev = even_->describe(), od = odd_->describe();
            for (std::string* part : {&ev, &od}) {
                std::string out;
                std::istringstream is(*part);
                std::string tok;
                bool firsttok = true;
                while (std::getline(is, tok, ',')) {
                    if (!firsttok) out += ',';
                    out += (part == &ev ? "even." : "odd.") + tok;
                    firsttok = false;
                }
                *part = out;
            }
            os << "kind=even_odd," << ev << "," << od;
            break;
        }
        case Family::factorial_blocks:
            os << "kind=factorial_blocks";
            break;
        case Family::reciprocal:
            os << "kind=reciprocal";
            break;
        case Family::custom_table: {
            os << "kind=custom_table,values=";
            for (std::size_t i = 0; i < table_.size(); ++i) {
                if (i) os << ';';
                os << fmt(table_[i]);
            }
            os << ",tail=";
            if (tail_.kind == Tail::Kind::constant)
                os << "constant:" << fmt(tail_.value);
            else
                os << "last";
            break;
        }
    }
    os << ",first=" << fmt(first_);
    return os.str();
}

namespace {

struct AnalyticClass {
    MixingVerdict mixing;
    Regime regime;
};

// The constant a custom table settles on once the horizon sees past it.
std::optional<double> literal_tail_constant(const Schedule& s, std::uint64_t horizon) {
    if (s.family() != Schedule::Family::custom_table) return std::nullopt;
    if (horizon < s.table().size() + 2) return std::nullopt;
    if (s.tail().kind == Tail::Kind::constant) return s.tail().value;
    return s.table().empty() ? 0.5 : s.table().back();
}

std::optional<AnalyticClass> analytic_class(const Schedule& s) {
    using F = Schedule::Family;
    switch (s.family()) {
        case F::constant:
            return AnalyticClass{MixingVerdict::mixing, Regime::bounded_band};
        case F::power_cooling:
            return AnalyticClass{MixingVerdict::mixing, Regime::subcritical_cooling};
        case F::critical_cooling:
        case F::reciprocal:
            return AnalyticClass{MixingVerdict::mixing, Regime::critical_cooling};
        case F::harmonic_heating:
        case F::power_heating:
            return AnalyticClass{MixingVerdict::mixing, Regime::heating};
        case F::factorial_blocks:
            // n p_n -> inf but not monotonically (collapses at each block
            // boundary), so no band with proven behavior applies.
            return AnalyticClass{MixingVerdict::mixing, Regime::irregular};
        case F::even_odd: {
            auto e = analytic_class(*s.even_rule());
            auto o = analytic_class(*s.odd_rule());
            if (e && o && e->mixing == o->mixing && e->regime == o->regime) return e;
            return std::nullopt;
        }
        case F::custom_table:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

RegimeVerdict classify(const Schedule& s, std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("classify: horizon must be >= 1");

    RegimeVerdict out;
    ScheduleDiagnostics& d = out.diagnostics;
    d.horizon = horizon;

    const std::uint64_t half = std::max<std::uint64_t>(horizon / 2, 2);
    double d_min_top = 0.0, d_p_top = 0.0, d_q_top = 0.0;
    double win_min_p = 1.0, win_max_p = 0.0, win_min_pq = 1.0;
    double a_at_half = 0.0;

    for (std::uint64_t n = 2; n <= horizon; ++n) {
        const double p = s.prob(n);
        const double q = 1.0 - p;
        const double m = std::min(p, q);
        d.sum_p += p;
        d.sum_q += q;
        d.sum_min_pq += m;
        if (n == half) a_at_half = s.turn_rate(n);
        if (n > half) {
            d_min_top += m;
            d_p_top += p;
            d_q_top += q;
            win_min_p = std::min(win_min_p, p);
            win_max_p = std::max(win_max_p, p);
            win_min_pq = std::min(win_min_pq, m);
        }
    }
    d.turn_rate_at_horizon = s.turn_rate(horizon);

    if (auto ac = analytic_class(s)) {
        out.mixing = ac->mixing;
        out.regime = ac->regime;
        return out;
    }

    // Literal tail of a custom table, when the horizon sees past the table.
    if (const auto v = literal_tail_constant(s, horizon)) {
        if (*v == 0.0) {
            out.mixing = MixingVerdict::non_mixing;
            out.regime = Regime::lower_supercritical;
        } else if (*v == 1.0) {
            out.mixing = MixingVerdict::non_mixing;
            out.regime = Regime::upper_supercritical;
        } else {
            out.mixing = MixingVerdict::mixing;
            out.regime = Regime::bounded_band;
        }
        return out;
    }

    // Even/odd composite of tables with literally constant tails: the
    // schedule eventually alternates between two constants.
    if (s.family() == Schedule::Family::even_odd) {
        const auto ve = literal_tail_constant(*s.even_rule(), horizon);
        const auto vo = literal_tail_constant(*s.odd_rule(), horizon);
        if (ve && vo) {
            const double me = std::min(*ve, 1.0 - *ve);
            const double mo = std::min(*vo, 1.0 - *vo);
            if (me + mo == 0.0) {
                out.mixing = MixingVerdict::non_mixing;
                if (*ve == 0.0 && *vo == 0.0)
                    out.regime = Regime::lower_supercritical;
                else if (*ve == 1.0 && *vo == 1.0)
                    out.regime = Regime::upper_supercritical;
                else
                    out.regime = Regime::irregular;  // eventually deterministic
            } else {
                out.mixing = MixingVerdict::mixing;
                out.regime = (me > 0.0 && mo > 0.0) ? Regime::bounded_band
                                                    : Regime::irregular;
            }
            return out;
        }
    }

    if (horizon < 16) {  // too little data for the pattern heuristics
        out.mixing = MixingVerdict::undetermined;
        out.regime = Regime::irregular;
        return out;
    }

    // Heuristic diagnostics. Mixing is declared only past a divergence
    // witness with the sum still visibly accumulating; non-mixing only when
    // the min(p,q) partial sums have numerically converged.
    constexpr double kWitness = 20.0;
    constexpr double kConverged = 1e-9;

    if (d.sum_min_pq >= kWitness && d_min_top >= 0.05 * d.sum_min_pq) {
        out.mixing = MixingVerdict::mixing;
        const double p_half = s.prob(half);
        const double p_end = s.prob(horizon);
        const double a_end = d.turn_rate_at_horizon;
        if (win_max_p <= 0.5 + 1e-12 && p_end <= p_half + 1e-12) {
            if (a_at_half > 0.0 && a_end >= 2.0 * a_at_half)
                out.regime = Regime::subcritical_cooling;
            else if (a_at_half > 0.0 && a_end >= a_at_half / 1.5 &&
                     a_end <= 1.5 * a_at_half)
                out.regime = Regime::critical_cooling;
            else if (a_end < 0.5 && a_end <= 0.5 * a_at_half)
                out.regime = Regime::strongly_critical;
            else
                out.regime = Regime::irregular;
        } else if (win_min_p >= 0.5 - 1e-12) {
            out.regime = Regime::heating;
        } else if (win_min_pq >= 0.02) {
            out.regime = Regime::bounded_band;
        } else {
            out.regime = Regime::irregular;
        }
    } else if (d_min_top < kConverged) {
        out.mixing = MixingVerdict::non_mixing;
        if (d_p_top < kConverged)
            out.regime = Regime::lower_supercritical;
        else if (d_q_top < kConverged)
            out.regime = Regime::upper_supercritical;
        else
            out.regime = Regime::irregular;  // eventually deterministic, mixed parity
    } else {
        out.mixing = MixingVerdict::undetermined;
        out.regime = Regime::irregular;
    }
    return out;
}

const char* to_string(MixingVerdict v) {
    switch (v) {
        case MixingVerdict::mixing: return "mixing";
        case MixingVerdict::non_mixing: return "non-mixing";
        case MixingVerdict::undetermined: return "undetermined-at-horizon";
    }
    return "?";
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::lower_supercritical: return "lower-supercritical";
        case Regime::strongly_critical: return "strongly-critical";
        case Regime::critical_cooling: return "critical-cooling";
        case Regime::subcritical_cooling: return "subcritical-cooling";
        case Regime::bounded_band: return "bounded-band";
        case Regime::heating: return "heating";
        case Regime::upper_supercritical: return "upper-supercritical";
        case Regime::irregular: return "irregular";
    }
    return "?";
}

namespace {

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text) {
    KvMap kv;
    std::string token;
    const auto flush = [&]() {
        if (token.empty()) return;
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("schedule config: expected key=value, got '" +
                                        token + "'");
        const std::string key = token.substr(0, eq);
        if (kv.count(key))
            throw std::invalid_argument("schedule config: duplicate key '" + key + "'");
        kv[key] = token.substr(eq + 1);
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t')
            flush();
        else
            token.push_back(ch);
    }
    flush();
    return kv;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("schedule config: bad number for '" + key + "': " + v);
    }
}

std::uint64_t to_index(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("schedule config: bad index for '" + key + "': " + v);
    }
}

Tail parse_tail(const std::string& v) {
    if (v == "last") return Tail::last();
    const std::string prefix = "constant:";
    if (v.rfind(prefix, 0) == 0)
        return Tail::constant(to_double("tail", v.substr(prefix.size())));
    throw std::invalid_argument("schedule config: tail must be 'last' or 'constant:<v>'");
}

// Two-column CSV (n, p_n). n=1 rows set `first`; gaps default to 1/2.
void load_table_csv(const std::string& path, std::vector<double>& values, double& first) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("schedule config: cannot open csv '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream is(line);
        std::uint64_t n = 0;
        double p = 0.0;
        if (!(is >> n >> p))
            throw std::invalid_argument("schedule config: bad csv row '" + line + "'");
        if (n == 0) throw std::invalid_argument("schedule config: csv index must be >= 1");
        if (n == 1) {
            first = p;
            continue;
        }
        const std::size_t idx = n - 2;
        if (values.size() <= idx) values.resize(idx + 1, 0.5);
        values[idx] = p;
    }
}

std::vector<double> parse_values(const std::string& v) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(v);
    while (std::getline(is, tok, ';'))
        if (!tok.empty()) out.push_back(to_double("values", tok));
    return out;
}

Schedule from_kv(const KvMap& kv);

KvMap sub_config(const KvMap& kv, const std::string& prefix) {
    KvMap out;
    for (const auto& [k, v] : kv)
        if (k.rfind(prefix, 0) == 0) out[k.substr(prefix.size())] = v;
    return out;
}

Schedule from_kv(const KvMap& kv) {
    const auto it = kv.find("kind");
    if (it == kv.end()) throw std::invalid_argument("schedule config: missing 'kind'");
    const std::string kind = it->second;

    std::map<std::string, bool> used;
    for (const auto& [k, v] : kv) used[k] = false;
    used["kind"] = true;
    const auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto f = kv.find(key);
        if (f == kv.end()) return std::nullopt;
        used[key] = true;
        return f->second;
    };
    const auto need = [&](const std::string& key) -> std::string {
        auto v = get(key);
        if (!v)
            throw std::invalid_argument("schedule config: '" + kind + "' needs '" + key +
                                        "'");
        return *v;
    };
    const auto finish = [&](Schedule s) {
        for (const auto& [k, was_used] : used)
            if (!was_used)
                throw std::invalid_argument("schedule config: unknown key '" + k +
                                            "' for kind=" + kind);
        return s;
    };

    const double first = get("first") ? to_double("first", *get("first")) : 0.5;
    const std::uint64_t n0 = get("n0") ? to_index("n0", *get("n0")) : 1;

    if (kind == "constant")
        return finish(Schedule::constant(to_double("c", need("c")), first));
    if (kind == "power_cooling")
        return finish(Schedule::power_cooling(to_double("a", need("a")),
                                              to_double("gamma", need("gamma")), n0,
                                              first));
    if (kind == "critical_cooling")
        return finish(Schedule::critical_cooling(to_double("c", need("c")), n0, first));
    if (kind == "harmonic_heating")
        return finish(Schedule::harmonic_heating(to_double("c", need("c")), n0, first));
    if (kind == "power_heating")
        return finish(Schedule::power_heating(to_double("c", need("c")),
                                              to_double("gamma", need("gamma")), n0,
                                              first));
    if (kind == "factorial_blocks") return finish(Schedule::factorial_blocks(first));
    if (kind == "reciprocal") return finish(Schedule::reciprocal(first));
    if (kind == "custom_table") {
        std::vector<double> values;
        double table_first = first;
        if (auto csv = get("csv")) load_table_csv(*csv, values, table_first);
        if (auto inline_vals = get("values")) {
            if (!values.empty())
                throw std::invalid_argument(
                    "schedule config: give either csv= or values=, not both");
            values = parse_values(*inline_vals);
        }
        const Tail tail = get("tail") ? parse_tail(*get("tail")) : Tail::last();
        return finish(Schedule::custom_table(std::move(values), tail, table_first));
    }
    if (kind == "even_odd") {
        for (const auto& [k, v] : kv)
            if (k.rfind("even.", 0) == 0 || k.rfind("odd.", 0) == 0) used[k] = true;
        Schedule even = from_kv(sub_config(kv, "even."));
        Schedule odd = from_kv(sub_config(kv, "odd."));
        return finish(Schedule::even_odd(std::move(even), std::move(odd), first));
    }
    throw std::invalid_argument("schedule config: unknown kind '" + kind + "'");
}

}  // namespace

Schedule schedule_from_config(const std::string& text) { return from_kv(parse_kv(text)); }

}  // namespace cointurn
