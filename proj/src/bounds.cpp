#include "kacq/bounds.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kacq {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

bool Rational::operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string to_string(Setting s) {
    switch (s) {
        case Setting::Classical: return "classical";
        case Setting::Q1: return "q1";
        case Setting::Q2: return "q2";
    }
    return "?";
}

std::string to_string(BoundKind k) {
    switch (k) {
        case BoundKind::Upper: return "upper";
        case BoundKind::Lower: return "lower";
        case BoundKind::Absent: return "absent";
    }
    return "?";
}

Rational classical_exponent(int t) { return {t, t + 1}; }
Rational q1_lower_exponent(int t) { return {t, 2 * t + 1}; }
Rational q1_upper_exponent(int t) { return {static_cast<long long>(t) * (t + 1),
                                            static_cast<long long>(t + 1) * (t + 1) + 1}; }
Rational q2_lower_exponent(int t) { return {t - 1, 2 * t}; }

std::vector<BoundRecord> exponent_table(int t_max) {
    if (t_max < 1) throw std::invalid_argument("exponent_table: t_max must be >= 1");
    std::vector<BoundRecord> records;
    records.reserve(static_cast<std::size_t>(t_max) * 5);
    for (int t = 1; t <= t_max; ++t) {
        records.push_back({t, Setting::Classical, BoundKind::Upper, classical_exponent(t),
                           "classical candidate-collision attack"});
        records.push_back({t, Setting::Classical, BoundKind::Lower, classical_exponent(t),
                           "classical tight bound"});
        records.push_back({t, Setting::Q1, BoundKind::Lower, q1_lower_exponent(t),
                           "non-adaptive hybrid argument"});
        records.push_back({t, Setting::Q1, BoundKind::Upper, q1_upper_exponent(t),
                           "quantum walk key recovery"});
        records.push_back({t, Setting::Q2, BoundKind::Lower, q2_lower_exponent(t),
                           "oracle lifting of the Q1 bound"});
    }
    return records;
}

std::vector<BoundRecord> table1_records() {
    std::vector<BoundRecord> records;
    // t = 1 (Even-Mansour) entries from prior work.
    records.push_back({1, Setting::Q1, BoundKind::Upper, Rational{1, 3},
                       "BHT collision / offline-Simon attacks"});
    records.push_back({1, Setting::Q2, BoundKind::Upper, Rational{0, 1},
                       "Simon's algorithm (polynomial queries)"});
    records.push_back({1, Setting::Q2, BoundKind::Absent, std::nullopt, "no published lower bound"});
    // t = 2 Q2 attack upper bound (poly factor times 2^{n/2}).
    records.push_back({2, Setting::Q2, BoundKind::Upper, Rational{1, 2},
                       "Grover-meets-Simon style attack"});
    // 4-KAC with two alternating keys.
    records.push_back({4, Setting::Q2, BoundKind::Upper, Rational{1, 2},
                       "two-key 4-round quantum attack"});
    records.push_back({4, Setting::Q2, BoundKind::Absent, std::nullopt, "no published lower bound"});
    return records;
}

std::string emit_csv(const std::vector<BoundRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_csv: no records");
    std::ostringstream out;
    out << "t,setting,kind,exponent_num,exponent_den,source\n";
    for (const auto& rec : records) {
        out << rec.t << ',' << to_string(rec.setting) << ',' << to_string(rec.kind) << ',';
        if (rec.exponent) out << rec.exponent->num << ',' << rec.exponent->den;
        else out << ',';
        out << ",\"" << rec.source << "\"\n";
    }
    return out.str();
}

nlohmann::ordered_json emit_json(const std::vector<BoundRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_json: no records");
    auto arr = nlohmann::ordered_json::array();
    for (const auto& rec : records) {
        nlohmann::ordered_json j;
        j["t"] = rec.t;
        j["setting"] = to_string(rec.setting);
        j["kind"] = to_string(rec.kind);
        if (rec.exponent) {
            j["exponent_num"] = rec.exponent->num;
            j["exponent_den"] = rec.exponent->den;
        } else {
            j["exponent_num"] = nullptr;
            j["exponent_den"] = nullptr;
        }
        j["source"] = rec.source;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string emit_gnuplot(const std::vector<BoundRecord>& records) {
    if (records.empty()) throw std::invalid_argument("emit_gnuplot: no records");
    std::ostringstream out;
    auto family = [&](Setting s, BoundKind k, const char* title) {
        out << "# " << title << "\n";
        for (const auto& rec : records) {
            if (rec.setting == s && rec.kind == k && rec.exponent) {
                out << rec.t << ' ' << rec.exponent->value() << '\n';
            }
        }
        out << "\n\n";
    };
    family(Setting::Classical, BoundKind::Upper, "classical");
    family(Setting::Q1, BoundKind::Lower, "q1 lower");
    family(Setting::Q1, BoundKind::Upper, "q1 upper");
    family(Setting::Q2, BoundKind::Lower, "q2 lower");
    return out.str();
}

}  // namespace kacq
