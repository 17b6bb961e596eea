#pragma once
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <vector>

namespace reslab {

struct QuadratureSettings {
    double abs_tol = 1e-11;
    double t_cut = 18.0;  // e^{-sqrt3 t_cut} < 1e-13: tail below tolerance
};

template <class F>
double integrate_segment(F&& f, double a, double b, double tol = 1e-12) {
    double err = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        std::forward<F>(f), a, b, 15, tol, &err);
    return v;
}

// reproducible pairwise summation for parallel sweeps and long accumulations
inline double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v, 0, v.size()); }

}  // namespace reslab
