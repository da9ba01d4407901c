#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>

namespace sgl {

// 50-decimal-digit binary float. The discretization constants are
// intentionally astronomically large (exp of ~1e7 at modest horizons) and
// must not silently saturate to infinity.
using BigFloat = boost::multiprecision::cpp_bin_float_50;

// exp(x) in double while it is representable, promoted to big-float once the
// exponent argument exceeds 700.
inline BigFloat exp_adaptive(double x) {
    if (x <= 700.0 && x >= -700.0) return BigFloat(std::exp(x));
    return boost::multiprecision::exp(BigFloat(x));
}

inline double big_to_double(const BigFloat& x) { return static_cast<double>(x); }

inline double big_log10(const BigFloat& x) {
    if (x <= 0) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(boost::multiprecision::log10(x));
}

}  // namespace sgl
