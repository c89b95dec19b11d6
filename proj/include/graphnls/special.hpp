#ifndef GRAPHNLS_SPECIAL_HPP
#define GRAPHNLS_SPECIAL_HPP

#include <cmath>
#include <complex>

namespace graphnls {

using cplx = std::complex<double>;

// Entire functions of w:
//   cos_sqrt(w, a)  = cos(a*sqrt(w))          (= cosh(a*sqrt(-w)) for w < 0)
//   sinc_sqrt(w, a) = sin(a*sqrt(w))/sqrt(w)  (= sinh(a*sqrt(-w))/sqrt(-w))
// Both are even in sqrt(w), so the branch of the root never matters.  The
// series fallbacks keep the derivatives finite through w = 0.

inline double cos_sqrt(double w, double a) {
    if (w >= 0.0) return std::cos(a * std::sqrt(w));
    return std::cosh(a * std::sqrt(-w));
}

inline double sinc_sqrt(double w, double a) {
    double z = a * a * w;
    if (std::abs(z) < 1e-6) {
        // a * (1 - z/6 + z^2/120 - z^3/5040)
        return a * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
    }
    if (w > 0.0) {
        double s = std::sqrt(w);
        return std::sin(a * s) / s;
    }
    double s = std::sqrt(-w);
    return std::sinh(a * s) / s;
}

// d/dw of sinc_sqrt
inline double dsinc_sqrt(double w, double a) {
    double z = a * a * w;
    if (std::abs(z) < 1e-4) {
        double a3 = a * a * a;
        return a3 * (-1.0 / 6.0 + z / 60.0 - z * z / 1680.0 + z * z * z / 75600.0);
    }
    return (a * cos_sqrt(w, a) - sinc_sqrt(w, a)) / (2.0 * w);
}

// d^2/dw^2 of sinc_sqrt
inline double d2sinc_sqrt(double w, double a) {
    double z = a * a * w;
    if (std::abs(z) < 1e-3) {
        double a5 = std::pow(a, 5);
        return a5 * (1.0 / 60.0 - z / 840.0 + z * z / 30240.0);
    }
    double c = cos_sqrt(w, a), s = sinc_sqrt(w, a), ds = dsinc_sqrt(w, a);
    return ((-0.5 * a * a * s - ds) * w - (a * c - s)) / (2.0 * w * w);
}

// d/dw cos_sqrt = -(a/2) * sinc_sqrt
inline double dcos_sqrt(double w, double a) { return -0.5 * a * sinc_sqrt(w, a); }

inline double d2cos_sqrt(double w, double a) { return -0.5 * a * dsinc_sqrt(w, a); }

// Complex counterparts (cos is even, so sqrt branch is immaterial).
inline cplx cos_sqrt(cplx w, double a) { return std::cos(a * std::sqrt(w)); }

inline cplx sinc_sqrt(cplx w, double a) {
    cplx z = a * a * w;
    if (std::abs(z) < 1e-6) {
        return a * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
    }
    cplx s = std::sqrt(w);
    return std::sin(a * s) / s;
}

} // namespace graphnls

#endif
