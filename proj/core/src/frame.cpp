#include "loopcmc/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "loopcmc/parallel.hpp"

namespace loopcmc {

namespace {

constexpr double kPi = std::numbers::pi;

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

struct SegGeom {
    cplx at(double t) const {
        if (!arc) return z0 + t * (z1 - z0);
        const double th = th0 + t * (th1 - th0);
        return center + std::polar(radius, th);
    }
    cplx d_at(double t) const {
        if (!arc) return z1 - z0;
        const double th = th0 + t * (th1 - th0);
        return cplx(0.0, th1 - th0) * std::polar(radius, th);
    }
    bool arc;
    cplx z0, z1, center;
    double radius, th0, th1;
};

SegGeom geom(const Path::Seg& s) {
    return {s.is_arc, s.z0, s.z1, s.center, s.radius, s.th0, s.th1};
}

// One lambda: integrate Y' = Y * xi(z(t), lambda) z'(t) across all segments.
Mat2 integrate_one(const Potential& pot, const Path& path, cplx lambda, const OdeOptions& opts,
                   Mat2 y) {
    long steps = 0;
    for (const auto& seg : path.segs) {
        const SegGeom g = geom(seg);
        auto rhs = [&](double t, const Mat2& yy) { return yy * (pot.eval(g.at(t), lambda) * g.d_at(t)); };
        double t = 0.0, h = opts.h_init;
        Mat2 k1 = rhs(t, y);
        while (t < 1.0) {
            h = std::min(h, 1.0 - t);
            const Mat2 y2 = y + k1 * (h * A21);
            const Mat2 k2 = rhs(t + h / 5, y2);
            const Mat2 y3 = y + k1 * (h * A31) + k2 * (h * A32);
            const Mat2 k3 = rhs(t + 3 * h / 10, y3);
            const Mat2 y4 = y + k1 * (h * A41) + k2 * (h * A42) + k3 * (h * A43);
            const Mat2 k4 = rhs(t + 4 * h / 5, y4);
            const Mat2 y5 = y + k1 * (h * A51) + k2 * (h * A52) + k3 * (h * A53) + k4 * (h * A54);
            const Mat2 k5 = rhs(t + 8 * h / 9, y5);
            const Mat2 y6 =
                y + k1 * (h * A61) + k2 * (h * A62) + k3 * (h * A63) + k4 * (h * A64) + k5 * (h * A65);
            const Mat2 k6 = rhs(t + h, y6);
            const Mat2 ynew = y + k1 * (h * B1) + k3 * (h * B3) + k4 * (h * B4) + k5 * (h * B5) +
                              k6 * (h * B6);
            const Mat2 k7 = rhs(t + h, ynew);
            const Mat2 err = k1 * (h * E1) + k3 * (h * E3) + k4 * (h * E4) + k5 * (h * E5) +
                             k6 * (h * E6) + k7 * (h * E7);
            const double scale = opts.tol * std::max(1.0, y.norm());
            const double e = err.norm();
            if (e <= scale) {
                t += h;
                y = ynew;
                k1 = k7;  // FSAL
            }
            const double f = e > 0 ? 0.9 * std::pow(scale / e, 0.2) : 5.0;
            h *= std::clamp(f, 0.2, 5.0);
            if (h < opts.h_min)
                throw std::runtime_error("integrate: step size underflow (puncture too close?)");
            if (++steps > opts.max_steps)
                throw std::runtime_error("integrate: step budget exhausted");
        }
    }
    return y;
}

}  // namespace

Path Path::line(cplx z0, cplx z1) {
    Path p;
    p.segs.push_back({false, z0, z1, 0.0, 0.0, 0.0, 0.0});
    return p;
}

Path Path::polyline(std::span<const cplx> pts) {
    Path p;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        p.segs.push_back({false, pts[i], pts[i + 1], 0.0, 0.0, 0.0, 0.0});
    return p;
}

Path Path::arc(cplx center, double radius, double th0, double th1) {
    Path p;
    p.segs.push_back({true, 0.0, 0.0, center, radius, th0, th1});
    return p;
}

Path Path::puncture_loop(cplx base, cplx center, double radius) {
    Path p;
    const cplx dir = base - center;
    const double dist = std::abs(dir);
    cplx entry;
    double th0;
    if (dist > radius * (1.0 + 1e-12)) {
        entry = center + radius * (dir / dist);
        th0 = std::arg(dir);
        p.segs.push_back({false, base, entry, 0.0, 0.0, 0.0, 0.0});
    } else {
        // basepoint on/inside the circle: start the arc at the basepoint angle
        entry = center + std::polar(radius, std::arg(dir));
        th0 = std::arg(dir);
        if (std::abs(base - entry) > 1e-15)
            p.segs.push_back({false, base, entry, 0.0, 0.0, 0.0, 0.0});
    }
    p.segs.push_back({true, 0.0, 0.0, center, radius, th0, th0 + 2.0 * kPi});
    if (std::abs(base - entry) > 1e-15)
        p.segs.push_back({false, entry, base, 0.0, 0.0, 0.0, 0.0});
    return p;
}

cplx Path::start() const {
    const auto& s = segs.front();
    return s.is_arc ? s.center + std::polar(s.radius, s.th0) : s.z0;
}

cplx Path::end() const {
    const auto& s = segs.back();
    return s.is_arc ? s.center + std::polar(s.radius, s.th1) : s.z1;
}

double Path::min_distance_to(cplx point) const {
    double d = 1e300;
    for (const auto& s : segs) {
        const SegGeom g = geom(s);
        for (int i = 0; i <= 64; ++i) d = std::min(d, std::abs(g.at(i / 64.0) - point));
    }
    return d;
}

std::vector<Mat2> integrate_values(const Potential& pot, const Path& path,
                                   std::span<const cplx> lambdas, const OdeOptions& opts,
                                   const Mat2& initial) {
    std::vector<Mat2> out(lambdas.size());
    parallel_for(
        lambdas.size(),
        [&](size_t i) {
            // clearance against the (possibly lambda-dependent) punctures
            for (const cplx& p : pot.punctures_for(lambdas[i]))
                if (path.min_distance_to(p) < opts.clearance)
                    throw std::runtime_error("integrate: path violates puncture clearance");
            out[i] = integrate_one(pot, path, lambdas[i], opts, initial);
        },
        opts.threads);
    return out;
}

double unimodularity_drift(std::span<const Mat2> values) {
    double d = 0.0;
    for (const auto& m : values) d = std::max(d, std::abs(m.det() - 1.0));
    return d;
}

MatrixLoop integrate_frame(const Potential& pot, const Path& path, int trunc,
                           const OdeOptions& opts, const Mat2& initial) {
    const int m = 4 * std::max(trunc, 1);
    std::vector<cplx> lams(m);
    for (int j = 0; j < m; ++j) lams[j] = std::polar(1.0, 2.0 * kPi * (j + 0.5) / m);
    const auto vals = integrate_values(pot, path, lams, opts, initial);
    return MatrixLoop::from_samples(vals, trunc, 1.0);
}

namespace {
double default_loop_radius(const Potential& pot, cplx center, cplx basepoint) {
    double r = std::abs(basepoint - center) / 2.0;
    for (const cplx& p : pot.punctures)
        if (std::abs(p - center) > 1e-12) r = std::min(r, std::abs(p - center) / 3.0);
    return std::min(r, 0.5);
}
}  // namespace

MatrixLoop monodromy(const Potential& pot, int puncture_index, cplx basepoint, int trunc,
                     double loop_radius, const OdeOptions& opts) {
    const cplx center = pot.punctures.at(puncture_index);
    if (loop_radius <= 0.0) loop_radius = default_loop_radius(pot, center, basepoint);
    return monodromy_about(pot, center, loop_radius, basepoint, trunc, opts);
}

MatrixLoop monodromy_about(const Potential& pot, cplx center, double loop_radius, cplx basepoint,
                           int trunc, const OdeOptions& opts) {
    const Path loop = Path::puncture_loop(basepoint, center, loop_radius);
    return integrate_frame(pot, loop, trunc, opts);
}

std::vector<Mat2> monodromy_values(const Potential& pot, cplx center, double loop_radius,
                                   cplx basepoint, std::span<const cplx> lambdas,
                                   const OdeOptions& opts) {
    const Path loop = Path::puncture_loop(basepoint, center, loop_radius);
    return integrate_values(pot, loop, lambdas, opts);
}

cplx delaunay_nu(double q, cplx lambda, SpaceForm space) {
    const cplx i(0.0, 1.0);
    if (space == SpaceForm::H3) {
        if (q * q == 1.0) throw std::invalid_argument("delaunay_nu: q^2 = 1");
        return 0.5 * i * std::sqrt((lambda - q) * (-1.0 / lambda - q) / (q * q - 1.0));
    }
    if (space == SpaceForm::AdS3)
        return 0.5 * i * std::sqrt((q * q + 1.0 - q * (lambda + 1.0 / lambda)) / (q * q + 1.0));
    throw std::invalid_argument("delaunay_nu: only the H3 and AdS3 families are defined");
}

double end_eigenvalue_check(const MatrixLoop& m, double q_res,
                            const std::function<cplx(cplx)>& f, std::span<const cplx> lambdas) {
    double dev = 0.0;
    for (const cplx& lam : lambdas) {
        const cplx tr = m.eval(lam).trace() * 0.5;
        const cplx kappa = 4.0 * f(lam) / lam;
        const cplx nu = 0.5 - 0.5 * std::sqrt(1.0 + q_res * kappa);
        const cplx model = std::cos(2.0 * kPi * nu);
        dev = std::max(dev, std::min(std::abs(tr - model), std::abs(tr + model)));
    }
    return dev;
}

DelaunayFit fit_delaunay_weight(std::span<const cplx> lambdas, std::span<const cplx> half_traces,
                                cplx lambda0) {
    // Model: t(lambda) = s * cos(pi sqrt(1 + w prof(lambda))), w = q/(q^2-1),
    // prof = lambda0/lambda - conj(lambda0) lambda, s in {+1, -1} the spin lift.
    // 1-D least squares in w (both signs) by log scan plus ternary refinement.
    auto misfit = [&](double w, int s) {
        double dev = 0.0;
        for (size_t i = 0; i < lambdas.size(); ++i) {
            const cplx prof = lambda0 / lambdas[i] - std::conj(lambda0) * lambdas[i];
            const cplx model = double(s) * std::cos(kPi * std::sqrt(1.0 + w * prof));
            dev = std::max(dev, std::abs(half_traces[i] - model));
        }
        return dev;
    };
    DelaunayFit best{0.0, 1e300};
    for (int s : {1, -1}) {
        for (int sw : {1, -1}) {
            double wb = 1e-8, fb = 1e300;
            for (int i = 0; i <= 220; ++i) {
                const double w = sw * 1e-8 * std::pow(1e11, i / 220.0);
                const double f = misfit(w, s);
                if (f < fb) {
                    fb = f;
                    wb = w;
                }
            }
            double lo = wb / 1.2, hi = wb * 1.2;
            if (lo > hi) std::swap(lo, hi);
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                if (misfit(m1, s) < misfit(m2, s))
                    hi = m2;
                else
                    lo = m1;
            }
            const double w = 0.5 * (lo + hi), f = misfit(w, s);
            if (f < best.deviation) {
                // q/(q^2-1) = w with |q|>1: q = (1 + sqrt(1+4w^2)) / (2w)
                best.q = (1.0 + std::sqrt(1.0 + 4.0 * w * w)) / (2.0 * w);
                best.deviation = f;
            }
        }
    }
    return best;
}

}  // namespace loopcmc
