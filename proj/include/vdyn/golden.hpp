#pragma once

#include <cmath>
#include <utility>

#include "vdyn/common.hpp"

namespace vdyn {

// Golden-section search for the minimum of a unimodal function on [lo, hi].
// Returns the abscissa of the minimum to within tol.
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double tol = 1e-6) {
    require(lo < hi, "golden_section_minimize: lo must be < hi");
    require(tol > 0.0, "golden_section_minimize: tol must be > 0");
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;

    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace vdyn
