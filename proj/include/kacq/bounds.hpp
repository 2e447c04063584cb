#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kacq {

// Exact rational, kept normalized so table assertions are equality checks.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;
};

enum class Setting { Classical, Q1, Q2 };
enum class BoundKind { Upper, Lower, Absent };

std::string to_string(Setting s);
std::string to_string(BoundKind k);

struct BoundRecord {
    int t = 0;
    Setting setting = Setting::Classical;
    BoundKind kind = BoundKind::Upper;
    std::optional<Rational> exponent;  // empty for absent entries
    std::string source;
};

// Exponent families, as query exponents of 2^{e*n}:
//   classical (both kinds):  t/(t+1)
//   Q1 lower:                t/(2t+1)
//   Q1 upper (walk attack):  t(t+1)/((t+1)^2+1)
//   Q2 lower (lifting):      (t-1)/(2t)
Rational classical_exponent(int t);
Rational q1_lower_exponent(int t);
Rational q1_upper_exponent(int t);
Rational q2_lower_exponent(int t);

// Five records per t (classical upper+lower, Q1 lower+upper, Q2 lower).
std::vector<BoundRecord> exponent_table(int t_max);

// Literal mirror of the published summary rows that do not come from the
// four families: cited attacks and the unknown ("absent") cells.
std::vector<BoundRecord> table1_records();

// Deterministic column order: t, setting, kind, exponent_num, exponent_den, source.
std::string emit_csv(const std::vector<BoundRecord>& records);
nlohmann::ordered_json emit_json(const std::vector<BoundRecord>& records);
// Two-column (t, exponent) series per (setting, kind) family, gnuplot-style.
std::string emit_gnuplot(const std::vector<BoundRecord>& records);

}  // namespace kacq
