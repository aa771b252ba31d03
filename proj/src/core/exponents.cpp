#include "exponents.hpp"

#include <cmath>
#include <numeric>

namespace sns {

Rational Rational::make(long long n, long long d) {
    if (d == 0) return infinity();
    if (d < 0) { n = -n; d = -d; }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return Rational{n, d};
}

Rational Rational::from_double(double x, long long max_den) {
    if (std::isinf(x)) return infinity();
    // continued-fraction convergents until the reconstruction is exact-ish
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int it = 0; it < 64; ++it) {
        double fa = std::floor(r);
        long long a = static_cast<long long>(fa);
        long long p2 = a * p1 + p0;
        long long q2 = a * q1 + q0;
        if (q2 > max_den || q2 < 0) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= 1e-12 * std::max(1.0, std::abs(x))) break;
        double frac = r - fa;
        if (frac < 1e-15) break;
        r = 1.0 / frac;
    }
    if (q1 == 0) return make(p1 >= 0 ? 1 : -1, 0);
    return make(p1, q1);
}

Rational Rational::operator*(const Rational& o) const {
    if (is_inf() || o.is_inf()) return infinity();
    return make(num * o.num, den * o.den);
}

Rational Rational::operator-(const Rational& o) const {
    if (is_inf() || o.is_inf()) throw Error("rational: subtraction with infinity");
    return make(num * o.den - o.num * den, den * o.den);
}

bool strichartz_admissible(const Rational& p, const Rational& q, int d) {
    auto in_range = [](const Rational& r) {
        if (r.is_inf()) return true;
        return r.num >= 2 * r.den; // r >= 2
    };
    if (!in_range(p) || !in_range(q)) return false;
    if (p.is_inf() && q == Rational::make(2, 1) && d == 2) return false;

    // 2/q = d(1/2 - 1/p)  <=>  4p = d q (p - 2), with the infinite cases split out.
    if (q.is_inf()) {
        // LHS 0: need p == 2
        return p == Rational::make(2, 1);
    }
    if (p.is_inf()) {
        // RHS d/2: need 2/q == d/2 <=> q == 4/d
        return q == Rational::make(4, d);
    }
    long long lhs_num = 4 * p.num * q.den;                      // 4p * (q.den)
    long long rhs_num = d * q.num * (p.num - 2 * p.den);        // d q (p-2) scaled by p.den*q.den
    // common denominator p.den*q.den on both sides:
    // 4p -> 4*p.num/p.den ; d*q*(p-2) -> d*(q.num/q.den)*((p.num-2p.den)/p.den)
    // cross-multiply: 4*p.num*q.den == d*q.num*(p.num-2*p.den)
    return lhs_num == rhs_num;
}

bool strichartz_admissible(double p, double q, int d) {
    return strichartz_admissible(Rational::from_double(p), Rational::from_double(q), d);
}

const char* criticality_name(Criticality c) {
    switch (c) {
        case Criticality::MassSub: return "mass-subcritical";
        case Criticality::MassCritical: return "mass-critical";
        case Criticality::InterCritical: return "inter-critical";
        case Criticality::EnergyCritical: return "energy-critical";
        case Criticality::Super: return "super-critical";
    }
    return "?";
}

double ExponentTable::h(double t) const { return std::pow(1.0 - t, h_power); }

ExponentTable exponents(int d, double alpha, int lambda) {
    if (d < 1 || d > 3) throw ConfigError("exponents: d must be 1, 2 or 3");
    if (!(alpha > 1.0)) throw ConfigError("exponents: alpha must exceed 1");
    ExponentTable t;
    t.d = d;
    t.alpha = alpha;
    t.lambda = lambda;
    double dd = static_cast<double>(d);
    t.strauss = (2.0 - dd + std::sqrt(dd * dd + 12.0 * dd + 4.0)) / (2.0 * dd);
    t.h_power = 0.5 * (dd * (alpha - 1.0) - 4.0);
    double qden = 4.0 - (alpha - 1.0) * (dd - 2.0);
    if (qden > 0.0) {
        t.q_tilde = 2.0 * (alpha * alpha - 1.0) / qden;
        t.q_tilde_finite = true;
        t.theta = 4.0 / qden;
    } else {
        t.q_tilde = std::numeric_limits<double>::infinity();
        t.q_tilde_finite = false;
        t.theta = std::numeric_limits<double>::infinity();
    }
    t.p1 = 2.0 + 4.0 / dd;
    t.p2 = 2.0 * dd * (dd + 2.0) / (dd * dd + 4.0);
    t.q2 = (d > 2) ? 2.0 * (dd + 2.0) / (dd - 2.0) : std::numeric_limits<double>::infinity();

    double mass_crit = 1.0 + 4.0 / dd;
    double energy_crit = (d > 2) ? 1.0 + 4.0 / (dd - 2.0) : std::numeric_limits<double>::infinity();
    if (alpha < mass_crit) t.cls = Criticality::MassSub;
    else if (alpha == mass_crit) t.cls = Criticality::MassCritical;
    else if (alpha < energy_crit) t.cls = Criticality::InterCritical;
    else if (alpha == energy_crit) t.cls = Criticality::EnergyCritical;
    else t.cls = Criticality::Super;

    t.theorem_range = (d == 3);
    return t;
}

} // namespace sns
