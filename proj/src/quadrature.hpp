#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace georing::detail {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Gauss-Kronrod (7/15). A panel is accepted once the Kronrod and
// Gauss estimates agree to rel_tol of the running total.
class Quadrature {
public:
    explicit Quadrature(double rel_tol = 1e-9, int max_depth = 40) : rel_tol_(rel_tol), max_depth_(max_depth) {}

    double integrate(const std::function<double(double)>& f, double a, double b, int initial_panels = 1) const
    {
        if (!(b > a))
            return 0.0;
        double h = (b - a) / initial_panels;
        double coarse = 0.0;
        for (int k = 0; k < initial_panels; ++k) {
            double err;
            coarse += kronrod(f, a + k * h, a + (k + 1) * h, err);
        }
        double abs_tol = rel_tol_ * std::max(std::abs(coarse), 1e-300) / initial_panels;
        double total = 0.0;
        for (int k = 0; k < initial_panels; ++k)
            total += refine(f, a + k * h, a + (k + 1) * h, abs_tol, 0);
        return total;
    }

private:
    static double kronrod(const std::function<double(double)>& f, double a, double b, double& err)
    {
        static constexpr std::array<double, 8> xgk = {
            0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
        static constexpr std::array<double, 8> wgk = {
            0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
        static constexpr std::array<double, 4> wg = {
            0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
            0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

        double center = 0.5 * (a + b);
        double half = 0.5 * (b - a);
        double fc = f(center);
        double kron = fc * wgk[7];
        double gauss = fc * wg[3];
        for (int j = 0; j < 7; ++j) {
            double dx = half * xgk[j];
            double pair = f(center - dx) + f(center + dx);
            kron += wgk[j] * pair;
            if (j % 2 == 1)
                gauss += wg[j / 2] * pair;
        }
        err = std::abs((kron - gauss) * half);
        return kron * half;
    }

    double refine(const std::function<double(double)>& f, double a, double b, double abs_tol, int depth) const
    {
        double err;
        double est = kronrod(f, a, b, err);
        if (err <= abs_tol || err <= 1e-15 * std::abs(est))
            return est;
        if (depth >= max_depth_) {
            std::ostringstream os;
            os << "quadrature did not converge on [" << a << ", " << b << "]: estimate " << est << ", error "
               << err << " > tolerance " << abs_tol;
            throw QuadratureError(os.str());
        }
        double mid = 0.5 * (a + b);
        return refine(f, a, mid, 0.5 * abs_tol, depth + 1) + refine(f, mid, b, 0.5 * abs_tol, depth + 1);
    }

    double rel_tol_;
    int max_depth_;
};

}  // namespace georing::detail
