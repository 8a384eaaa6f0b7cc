#include "vfo_adr/properties.hpp"

#include "vfo_adr/adr_controller.hpp"
#include "vfo_adr/path_geometry.hpp"
#include "vfo_adr/rigid_body.hpp"
#include "vfo_adr/vfo_controller.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <random>

namespace vfo_adr {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

// Points within 0.5 m of the path, kept away from degenerate regions.
std::vector<Vec3> near_path_points(const PathSpec& path, std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> out;
    while (out.size() < n) {
        const Vec3 p = path.reference_point(kTwoPi * u(rng)) +
                       0.5 * Vec3(2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0, 2.0 * u(rng) - 1.0);
        try {
            const PathFrame f = evaluate_frame(path, p);
            if (f.planar_tangent.norm() > 1e-3) out.push_back(p);
        } catch (const Error&) {
        }
    }
    return out;
}

}  // namespace

PropertyResult check_rotation_jacobian(std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> pitch(-kPi / 2.0 + 1e-2, kPi / 2.0 - 1e-2);
    double worst_r = 0.0, worst_j = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const Vec3 a(angle(rng), pitch(rng), angle(rng));
        const Mat3 r = rotation_matrix(a);
        worst_r = std::max(worst_r, (r.transpose() * r - Mat3::Identity()).norm());
        worst_j = std::max(worst_j, (jacobian(a) * jacobian_inverse(a) - Mat6::Identity()).cwiseAbs().maxCoeff());
    }
    PropertyResult res;
    res.name = "rotation and jacobian invariants";
    res.passed = worst_r < 1e-12 && worst_j < 1e-10;
    res.detail = fmt("max |R^T R - I|_F = %.3g, max |J J^-1 - I| = %.3g over %g attitudes", worst_r, worst_j,
                     static_cast<double>(samples));
    return res;
}

PropertyResult check_path_geometry(std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double h = 1e-5;
    double worst_orth = 0.0, worst_grad = 0.0, worst_hess = 0.0, worst_rate = 0.0, worst_unit = 0.0;
    const double rate_step = 1e-3;

    for (const PathSpec& path : {make_helix_path(), make_plane_ellipse_path()}) {
        for (const Vec3& p : near_path_points(path, samples, rng)) {
            const PathFrame f = evaluate_frame(path, p);
            worst_unit = std::max(worst_unit, std::abs(f.tangent.norm() - 1.0));
            const std::array<const LevelSurface*, 2> surf{&path.s1, &path.s2};
            for (int j = 0; j < 2; ++j) {
                const Vec3& g = f.gradients[j];
                worst_orth = std::max(worst_orth, std::abs(f.tangent.dot(g)) / g.norm());
                Vec3 fd_g;
                Mat3 fd_h;
                for (int a = 0; a < 3; ++a) {
                    Vec3 e = Vec3::Zero();
                    e(a) = h;
                    fd_g(a) = (surf[j]->value(p + e) - surf[j]->value(p - e)) / (2.0 * h);
                    fd_h.col(a) = (surf[j]->gradient(p + e) - surf[j]->gradient(p - e)) / (2.0 * h);
                }
                worst_grad = std::max(worst_grad, (fd_g - g).norm() / std::max(1.0, g.norm()));
                const Mat3 hs = surf[j]->hessian(p);
                worst_hess = std::max(worst_hess, (fd_h - hs).norm() / std::max(1.0, hs.norm()));
            }
            // tangent rate along the straight trajectory p + v t, five-point stencil
            const Vec3 v(normal(rng), normal(rng), normal(rng));
            const FrameRates r = frame_time_derivatives(path, f, p, v);
            auto tangent_at = [&](double t) { return evaluate_frame(path, p + t * v).tangent; };
            const Vec3 fd = (-tangent_at(2.0 * rate_step) + 8.0 * tangent_at(rate_step) -
                             8.0 * tangent_at(-rate_step) + tangent_at(-2.0 * rate_step)) /
                            (12.0 * rate_step);
            worst_rate = std::max(worst_rate, (fd - r.tangent_dot).norm() / std::max(1.0, v.squaredNorm() * v.norm()));
        }
    }
    PropertyResult res;
    res.name = "path geometry";
    const double rate_tol = 10.0 * rate_step * rate_step;
    res.passed = worst_orth < 1e-12 && worst_unit < 1e-12 && worst_grad < 1e-6 && worst_hess < 1e-6 &&
                 worst_rate < rate_tol;
    res.detail = fmt("orthogonality %.3g, gradient fd %.3g, hessian fd %.3g", worst_orth, worst_grad, worst_hess) +
                 fmt(", tangent-rate fd %.3g (tol %.3g), unit norm %.3g", worst_rate, rate_tol, worst_unit);
    return res;
}

PropertyResult check_observer_poles(const std::vector<double>& bandwidths) {
    PropertyResult res;
    res.name = "observer pole placement";
    res.passed = true;
    for (double w : bandwidths) {
        // Characteristic polynomial from trace, principal minors and
        // determinant, rescaled to x = s / w. The triple root is defective,
        // so a QR eigensolver only resolves it to about eps^(1/3); the
        // coefficient residual gives a sharper enclosure: if
        // |q(x) - (x + 1)^3| has coefficients below r, every root satisfies
        // |x + 1| <= (7 r)^(1/3) for |x| <= 2.
        const Mat3 a = observer_error_matrix(w);
        const double c2 = -a.trace();
        double c1 = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) c1 += a(i, i) * a(j, j) - a(i, j) * a(j, i);
        }
        const double c0 = -a.determinant();
        const double r = std::max({std::abs(c2 / w - 3.0), std::abs(c1 / (w * w) - 3.0),
                                   std::abs(c0 / (w * w * w) - 1.0)});
        const double enclosure = std::cbrt(7.0 * r);

        Eigen::EigenSolver<Mat3> es(a, false);
        double solver = 0.0;
        for (int i = 0; i < 3; ++i) solver = std::max(solver, std::abs(es.eigenvalues()(i) + w) / w);

        res.passed = res.passed && enclosure < 1e-6;
        res.detail += fmt("w=%g: |lambda/w + 1| <= %.3g (QR solver %.3g); ", w, enclosure, solver);
    }
    return res;
}

PropertyResult check_field_orthogonality(std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    std::size_t n = 0;
    for (const PathSpec& base : {make_helix_path(), make_plane_ellipse_path()}) {
        for (const Vec3& p : near_path_points(base, samples / 2, rng)) {
            PathSpec path = base;
            path.speed = 0.05 + u(rng);
            path.strategy = u(rng) < 0.5 ? -1 : 1;
            VfoGains g;
            g.k_p = 0.1 + 5.0 * u(rng);
            g.delta_p = 0.99 * u(rng);
            const Vec3 eps(normal(rng), normal(rng), normal(rng));
            const PathFrame f = evaluate_frame(path, p);
            const Vec3 field = convergence_field_longitudinal(f, g, path.desired_speed(), eps);
            const Vec3 rest = field - g.delta_p * eps - g.k_p * (f.s(0) * f.normals[0] + f.s(1) * f.normals[1]);
            for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(f.gradients[j].dot(rest)));
            ++n;
        }
    }
    PropertyResult res;
    res.name = "convergence field orthogonality";
    res.passed = worst < 1e-10;
    res.detail = fmt("max residual %.3g over %g states", worst, static_cast<double>(n));
    return res;
}

std::vector<PropertyResult> run_property_suite() {
    return {check_rotation_jacobian(), check_path_geometry(), check_observer_poles(), check_field_orthogonality()};
}

}  // namespace vfo_adr
