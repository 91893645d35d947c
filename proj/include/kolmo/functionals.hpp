#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kolmo/spectral.hpp"

namespace kolmo {

/// Named observable on truncated states, with the metadata the resolvent
/// estimator needs for its bias accounting.
struct StateFunctional {
    std::string name;
    std::function<double(const Vec&)> eval;
    double sup_norm = 1.0;  // infinity for unbounded entries
    double lipschitz = 1.0;
    bool bounded = true;
};

/// Registry: "one", "coordinate" or "coordinate(k)", "tanh_c1" or
/// "tanh_c1(s)", "gauss" or "gauss(a,d)" (exp(-a*|P_d x|^2)),
/// "coord_product" (c1*c2).
StateFunctional make_functional(const std::string& descriptor);

/// Smooth cylindrical test function of the first `dims` coordinates with
/// analytic first and second partial derivatives (no numerical
/// differentiation enters the identity checks).
struct CylinderFunction {
    std::string name;
    int dims = 1;
    std::function<double(const Vec&)> value;
    std::function<double(const Vec&, int)> d1;   // D_k, 0-based k < dims
    std::function<double(const Vec&, int)> d2;   // D_kk
    bool bounded = true;
};

/// Registry: "one", "c1", "c1_sq", "gauss_c1" (exp(-c1^2)),
/// "c1_gauss" (c1 exp(-c1^2/2)), "tanh_c1", "c1c2_gauss"
/// (c1 c2 exp(-(c1^2+c2^2)/2)).
CylinderFunction make_cylinder_function(const std::string& descriptor);

std::vector<std::string> cylinder_function_names();

}  // namespace kolmo
