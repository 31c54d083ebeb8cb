#pragma once

#include <cmath>
#include <gmpxx.h>
#include <string>

namespace lorentree {

// Global comparison tolerance for the float backend. Reads LORENTREE_EPS once.
double eps();
void set_eps(double value);

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static double from_int(long v) { return static_cast<double>(v); }
    static double from_ratio(long num, long den) { return static_cast<double>(num) / den; }
    static double abs(double v) { return std::fabs(v); }
    static double to_double(double v) { return v; }
    static bool is_zero(double v) { return std::fabs(v) <= eps(); }
    static bool is_exactly_zero(double v) { return v == 0.0; }
    static double sqrt(double v) { return std::sqrt(v); }
    static std::string to_string(double v);
};

template <>
struct ScalarTraits<mpq_class> {
    static constexpr bool exact = true;
    static mpq_class from_int(long v) { return mpq_class(v); }
    static mpq_class from_ratio(long num, long den)
    {
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    }
    static mpq_class abs(const mpq_class& v) { return ::abs(v); }
    static double to_double(const mpq_class& v) { return v.get_d(); }
    static bool is_zero(const mpq_class& v) { return sgn(v) == 0; }
    static bool is_exactly_zero(const mpq_class& v) { return sgn(v) == 0; }
    // Throws InvalidInput when v is not the square of a rational.
    static mpq_class sqrt(const mpq_class& v);
    static std::string to_string(const mpq_class& v) { return v.get_str(); }
};

template <class S>
S pow_int(const S& base, int n)
{
    S result = ScalarTraits<S>::from_int(1);
    S b = base;
    bool invert = n < 0;
    unsigned k = invert ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
    while (k) {
        if (k & 1u)
            result *= b;
        b *= b;
        k >>= 1u;
    }
    if (invert)
        result = ScalarTraits<S>::from_int(1) / result;
    return result;
}

// Parses "1.25", "5/4", "-3" or "2e-1" into an exact rational.
mpq_class parse_rational(const std::string& text);

// arcosh with the rounding guard: arguments within eps below 1 clamp to 0,
// anything further below 1 is an error.
double guarded_arcosh(double x);

} // namespace lorentree
