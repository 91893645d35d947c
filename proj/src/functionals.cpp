#include "kolmo/functionals.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace kolmo {

namespace {

std::vector<double> split_args(const std::string& descriptor, std::string& head) {
    const auto open = descriptor.find('(');
    if (open == std::string::npos) {
        head = descriptor;
        return {};
    }
    if (descriptor.back() != ')')
        throw std::invalid_argument("functional: malformed descriptor '" + descriptor + "'");
    head = descriptor.substr(0, open);
    std::vector<double> args;
    std::stringstream ss(descriptor.substr(open + 1, descriptor.size() - open - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
    return args;
}

}  // namespace

StateFunctional make_functional(const std::string& descriptor) {
    std::string head;
    const auto args = split_args(descriptor, head);
    StateFunctional f;
    f.name = descriptor;

    if (head == "one") {
        f.eval = [](const Vec&) { return 1.0; };
        f.sup_norm = 1.0;
        f.lipschitz = 0.0;
    } else if (head == "coordinate") {
        const int k = args.empty() ? 0 : static_cast<int>(args[0]) - 1;
        if (k < 0) throw std::invalid_argument("functional: coordinate index must be >= 1");
        f.eval = [k](const Vec& x) { return x[k]; };
        f.sup_norm = std::numeric_limits<double>::infinity();
        f.lipschitz = 1.0;
        f.bounded = false;
    } else if (head == "tanh_c1") {
        const double s = args.empty() ? 1.0 : args[0];
        f.eval = [s](const Vec& x) { return std::tanh(s * x[0]); };
        f.sup_norm = 1.0;
        f.lipschitz = std::abs(s);
    } else if (head == "gauss") {
        const double a = args.empty() ? 1.0 : args[0];
        const int d = args.size() > 1 ? static_cast<int>(args[1]) : 1;
        if (a <= 0.0 || d < 1) throw std::invalid_argument("functional: gauss needs a > 0, d >= 1");
        f.eval = [a, d](const Vec& x) {
            double s2 = 0.0;
            for (int k = 0; k < std::min<int>(d, x.size()); ++k) s2 += x[k] * x[k];
            return std::exp(-a * s2);
        };
        f.sup_norm = 1.0;
        f.lipschitz = std::sqrt(2.0 * a / std::exp(1.0));
    } else if (head == "coord_product") {
        f.eval = [](const Vec& x) { return x[0] * x[1]; };
        f.sup_norm = std::numeric_limits<double>::infinity();
        f.lipschitz = std::numeric_limits<double>::infinity();
        f.bounded = false;
    } else {
        throw std::invalid_argument("functional: unknown name '" + descriptor + "'");
    }
    return f;
}

CylinderFunction make_cylinder_function(const std::string& descriptor) {
    std::string head;
    const auto args = split_args(descriptor, head);
    (void)args;
    CylinderFunction f;
    f.name = descriptor;

    if (head == "one") {
        f.dims = 1;
        f.value = [](const Vec&) { return 1.0; };
        f.d1 = [](const Vec&, int) { return 0.0; };
        f.d2 = [](const Vec&, int) { return 0.0; };
    } else if (head == "c1") {
        f.dims = 1;
        f.bounded = false;
        f.value = [](const Vec& x) { return x[0]; };
        f.d1 = [](const Vec&, int) { return 1.0; };
        f.d2 = [](const Vec&, int) { return 0.0; };
    } else if (head == "c1_sq") {
        f.dims = 1;
        f.bounded = false;
        f.value = [](const Vec& x) { return x[0] * x[0]; };
        f.d1 = [](const Vec& x, int) { return 2.0 * x[0]; };
        f.d2 = [](const Vec&, int) { return 2.0; };
    } else if (head == "gauss_c1") {
        f.dims = 1;
        f.value = [](const Vec& x) { return std::exp(-x[0] * x[0]); };
        f.d1 = [](const Vec& x, int) { return -2.0 * x[0] * std::exp(-x[0] * x[0]); };
        f.d2 = [](const Vec& x, int) {
            return (4.0 * x[0] * x[0] - 2.0) * std::exp(-x[0] * x[0]);
        };
    } else if (head == "c1_gauss") {
        f.dims = 1;
        f.value = [](const Vec& x) { return x[0] * std::exp(-0.5 * x[0] * x[0]); };
        f.d1 = [](const Vec& x, int) {
            return (1.0 - x[0] * x[0]) * std::exp(-0.5 * x[0] * x[0]);
        };
        f.d2 = [](const Vec& x, int) {
            return x[0] * (x[0] * x[0] - 3.0) * std::exp(-0.5 * x[0] * x[0]);
        };
    } else if (head == "tanh_c1") {
        f.dims = 1;
        f.value = [](const Vec& x) { return std::tanh(x[0]); };
        f.d1 = [](const Vec& x, int) {
            const double c = std::cosh(x[0]);
            return 1.0 / (c * c);
        };
        f.d2 = [](const Vec& x, int) {
            const double t = std::tanh(x[0]);
            return -2.0 * t * (1.0 - t * t);
        };
    } else if (head == "c1c2_gauss") {
        f.dims = 2;
        f.value = [](const Vec& x) {
            return x[0] * x[1] * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
        };
        f.d1 = [](const Vec& x, int k) {
            const double e = std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
            const double other = x[1 - k];
            return other * (1.0 - x[k] * x[k]) * e;
        };
        f.d2 = [](const Vec& x, int k) {
            const double e = std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
            const double other = x[1 - k];
            return other * x[k] * (x[k] * x[k] - 3.0) * e;
        };
    } else {
        throw std::invalid_argument("cylinder function: unknown name '" + descriptor + "'");
    }
    return f;
}

std::vector<std::string> cylinder_function_names() {
    return {"one", "c1", "c1_sq", "gauss_c1", "c1_gauss", "tanh_c1", "c1c2_gauss"};
}

}  // namespace kolmo
