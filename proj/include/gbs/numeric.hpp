#ifndef GBS_NUMERIC_HPP
#define GBS_NUMERIC_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace gbs {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

inline Int abs_int(const Int& n) { return n < 0 ? Int(-n) : n; }

inline Int gcd_int(Int a, Int b) { return boost::multiprecision::gcd(a, b); }

// p-adic valuation of a nonzero integer.
inline unsigned valuation(Int n, const Int& p) {
    n = abs_int(n);
    unsigned v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

// Ascending list of distinct prime factors, by trial division.
// Inputs here are determinants of user-sized matrices, so this is plenty.
inline std::vector<Int> prime_factors(Int n) {
    std::vector<Int> out;
    n = abs_int(n);
    if (n <= 1) return out;
    for (Int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

inline bool is_perfect_square(const Int& n) {
    if (n < 0) return false;
    Int r = boost::multiprecision::sqrt(n);
    return r * r == n;
}

// A rational is a square in Q iff numerator and denominator (reduced,
// positive denominator) are both perfect squares.
inline bool is_rational_square(const Rat& q) {
    return q >= 0 && is_perfect_square(rat_num(q)) && is_perfect_square(rat_den(q));
}

inline std::string int_to_string(const Int& n) { return n.str(); }

// Rationals print as "p" or "p/q", always in lowest terms.
inline std::string rat_to_string(const Rat& q) {
    if (rat_den(q) == 1) return rat_num(q).str();
    return rat_num(q).str() + "/" + rat_den(q).str();
}

inline Int parse_int(const std::string& s) {
    try {
        return Int(s);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an integer: '" + s + "'");
    }
}

inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
}

} // namespace gbs

#endif // GBS_NUMERIC_HPP
