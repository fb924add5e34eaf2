#include "covlab/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace covlab {

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

bool Rational::operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string Rational::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text), 1);
        std::int64_t n = std::stoll(text.substr(0, slash));
        std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse rational '" + text + "'");
    }
}

namespace {

void factor_into(std::int64_t v, int sign, std::map<std::int64_t, int>& out) {
    for (std::int64_t p = 2; p * p <= v; p += (p == 2 ? 1 : 2)) {
        while (v % p == 0) {
            out[p] += sign;
            v /= p;
        }
    }
    if (v > 1) out[v] += sign;
}

}  // namespace

std::map<std::int64_t, int> factor_exponents(const Rational& r) {
    if (r.num == 0) throw std::invalid_argument("factoring zero");
    std::map<std::int64_t, int> out;
    factor_into(r.num < 0 ? -r.num : r.num, +1, out);
    factor_into(r.den, -1, out);
    for (auto it = out.begin(); it != out.end();) {
        if (it->second == 0) it = out.erase(it);
        else ++it;
    }
    return out;
}

int exponent_gcd(const std::map<std::int64_t, int>& v) {
    int g = 0;
    for (const auto& [p, e] : v) g = std::gcd(g, e < 0 ? -e : e);
    return g;
}

}  // namespace covlab
