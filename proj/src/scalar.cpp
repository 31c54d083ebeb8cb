#include "lorentree/scalar.hpp"

#include "lorentree/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <fmt/format.h>

namespace lorentree {

namespace {

double initial_eps()
{
    if (const char* env = std::getenv("LORENTREE_EPS")) {
        char* end = nullptr;
        double v = std::strtod(env, &end);
        if (end != env && v > 0.0)
            return v;
    }
    return 1e-9;
}

std::atomic<double>& eps_slot()
{
    static std::atomic<double> slot{initial_eps()};
    return slot;
}

mpz_class exact_isqrt(const mpz_class& v, bool& ok)
{
    if (sgn(v) < 0) {
        ok = false;
        return 0;
    }
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), v.get_mpz_t());
    ok = root * root == v;
    return root;
}

} // namespace

double eps() { return eps_slot().load(std::memory_order_relaxed); }

void set_eps(double value)
{
    if (!(value > 0.0))
        throw InvalidInput("tolerance must be positive");
    eps_slot().store(value, std::memory_order_relaxed);
}

std::string ScalarTraits<double>::to_string(double v) { return fmt::format("{:.17g}", v); }

mpq_class ScalarTraits<mpq_class>::sqrt(const mpq_class& v)
{
    bool ok_num = false;
    bool ok_den = false;
    mpz_class num = exact_isqrt(v.get_num(), ok_num);
    mpz_class den = exact_isqrt(v.get_den(), ok_den);
    if (!ok_num || !ok_den)
        throw InvalidInput("value " + v.get_str() + " is not the square of a rational");
    mpq_class r(num, den);
    r.canonicalize();
    return r;
}

mpq_class parse_rational(const std::string& text)
{
    if (text.empty())
        throw InvalidInput("empty number");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        mpq_class q;
        if (q.set_str(text, 10) != 0 || sgn(q.get_den()) == 0)
            throw InvalidInput("malformed fraction '" + text + "'");
        q.canonicalize();
        return q;
    }
    std::string mantissa = text;
    long exponent = 0;
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        mantissa = text.substr(0, e);
        try {
            std::size_t used = 0;
            exponent = std::stol(text.substr(e + 1), &used);
            if (used != text.size() - e - 1)
                throw InvalidInput("malformed exponent in '" + text + "'");
        } catch (const std::logic_error&) {
            throw InvalidInput("malformed exponent in '" + text + "'");
        }
    }
    bool negative = false;
    std::size_t pos = 0;
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        pos = 1;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false;
    for (; pos < mantissa.size(); ++pos) {
        char c = mantissa[pos];
        if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_dot)
                ++frac_digits;
        } else {
            throw InvalidInput("malformed number '" + text + "'");
        }
    }
    if (digits.empty())
        throw InvalidInput("malformed number '" + text + "'");
    mpz_class num(digits, 10);
    if (negative)
        num = -num;
    long shift = exponent - frac_digits;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    mpq_class q = shift < 0 ? mpq_class(num, scale) : mpq_class(num * scale);
    q.canonicalize();
    return q;
}

double guarded_arcosh(double x)
{
    if (x >= 1.0)
        return std::acosh(x);
    if (x >= 1.0 - eps())
        return 0.0;
    throw Error(fmt::format("arcosh argument {} below 1: not a pair of negative vectors", x));
}

} // namespace lorentree
