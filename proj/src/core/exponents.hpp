#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "common.hpp"

namespace sns {

// Exact rational with infinity (den == 0), used for the admissibility
// identity which must hold exactly, not to rounding.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational infinity() { return Rational{1, 0}; }
    bool is_inf() const { return den == 0; }

    static Rational make(long long n, long long d);
    // Snap a double to a nearby rational (continued fractions); infinities pass through.
    static Rational from_double(double x, long long max_den = 1000000);

    Rational operator*(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double to_double() const {
        return is_inf() ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(num) / static_cast<double>(den);
    }
};

// 2/q = d(1/2 - 1/p) with p,q in [2,inf], excluding the forbidden (inf,2,2).
bool strichartz_admissible(const Rational& p, const Rational& q, int d);
bool strichartz_admissible(double p, double q, int d);

enum class Criticality { MassSub, MassCritical, InterCritical, EnergyCritical, Super };

const char* criticality_name(Criticality c);

// Derived exponents for (d, alpha, lambda): Strauss threshold, the lens
// weight power in h(t) = (1-t)^h_power, the scale-invariant q~, the Holder
// exponent theta, and the faithful Strichartz pairs.
struct ExponentTable {
    int d = 3;
    double alpha = 3.0;
    int lambda = -1;

    double strauss = 0.0;   // alpha(d) = (2-d+sqrt(d^2+12d+4))/(2d)
    double h_power = 0.0;   // (d*(alpha-1)-4)/2
    double q_tilde = 0.0;   // 2(alpha^2-1)/(4-(alpha-1)(d-2)); inf at the energy-critical endpoint
    bool q_tilde_finite = true;
    double theta = 0.0;     // 4/(4-(d-2)(alpha-1)), may be inf
    double p1 = 0.0;        // 2+4/d, pair (p1,p1)
    double p2 = 0.0;        // 2d(d+2)/(d^2+4)
    double q2 = 0.0;        // 2(d+2)/(d-2); inf for d <= 2
    Criticality cls = Criticality::InterCritical;
    bool theorem_range = true; // d == 3 matches the d >= 3 hypotheses here

    double h(double t) const; // (1-t)^h_power
};

ExponentTable exponents(int d, double alpha, int lambda);

} // namespace sns
