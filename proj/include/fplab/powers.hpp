#pragma once

#include <cmath>

namespace fplab {

/// |t|^m with exact fast paths for the small integer exponents used most.
inline double abs_pow(double t, double m) {
    const double a = std::fabs(t);
    if (m == 2.0) return a * a;
    if (m == 1.0) return a;
    if (m == 3.0) return a * a * a;
    if (m == 4.0) {
        const double a2 = a * a;
        return a2 * a2;
    }
    if (m == 0.0) return 1.0;
    return std::pow(a, m);
}

/// |t|^(m-2) t, the derivative of |t|^m / m.
inline double signed_pow(double t, double m) {
    if (m == 2.0) return t;
    if (m == 3.0) return std::fabs(t) * t;
    if (m == 4.0) return t * t * t;
    if (t == 0.0) return 0.0;
    return std::pow(std::fabs(t), m - 2.0) * t;
}

}  // namespace fplab
