#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace covlab {

/// Exact rational in lowest terms with positive denominator.
/// Contraction ratios are carried exactly so that the lattice/nonlattice
/// classification is a proof, not a floating-point guess.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;

    bool in_unit_interval() const { return num > 0 && num < den; }
    std::string str() const;

    /// Parses "num/den" or a bare integer string. Throws std::invalid_argument.
    static Rational parse(const std::string& text);
};

/// Signed prime-exponent vector of a rational: num contributes +e, den -e.
/// Rational must be nonzero. 1/1 maps to the empty vector.
std::map<std::int64_t, int> factor_exponents(const Rational& r);

/// gcd of the absolute exponent values, 0 for the empty vector.
int exponent_gcd(const std::map<std::int64_t, int>& v);

}  // namespace covlab
