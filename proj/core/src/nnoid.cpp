#include "loopcmc/nnoid.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

#include "loopcmc/parallel.hpp"

namespace loopcmc {

namespace {
constexpr double kPi = std::numbers::pi;

// Real parameter vector layout:
//   [ tau_0..tau_{n-1},
//     Re/Im b_k[d] for k = 0..n-1, d = 0..D,
//     Re/Im z_k[d] with z_0[0] pinned (excluded) ]
int param_count(int n, int degree) { return n + 4 * n * (degree + 1) - 2; }

void pack(const NnoidParams& p, std::vector<double>& x) {
    const int n = p.ends(), dd = p.degree;
    x.clear();
    x.reserve(param_count(n, dd));
    for (int k = 0; k < n; ++k) x.push_back(p.tau[k]);
    for (int k = 0; k < n; ++k)
        for (int d = 0; d <= dd; ++d) {
            x.push_back(p.b[k][d].real());
            x.push_back(p.b[k][d].imag());
        }
    for (int k = 0; k < n; ++k)
        for (int d = 0; d <= dd; ++d) {
            if (k == 0 && d == 0) continue;  // gauge pin
            x.push_back(p.z[k][d].real());
            x.push_back(p.z[k][d].imag());
        }
}

void unpack(const std::vector<double>& x, NnoidParams& p) {
    const int n = p.ends(), dd = p.degree;
    size_t i = 0;
    for (int k = 0; k < n; ++k) p.tau[k] = x[i++];
    for (int k = 0; k < n; ++k)
        for (int d = 0; d <= dd; ++d) {
            p.b[k][d] = cplx(x[i], x[i + 1]);
            i += 2;
        }
    for (int k = 0; k < n; ++k)
        for (int d = 0; d <= dd; ++d) {
            if (k == 0 && d == 0) continue;
            p.z[k][d] = cplx(x[i], x[i + 1]);
            i += 2;
        }
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Based loop around `center` whose approach leg detours around the other
// punctures (the straight ray can cross them, e.g. reaching an outer end
// through an inner one). Deterministic waypoint construction.
Path routed_loop(std::span<const cplx> punctures, cplx base, cplx center, double radius,
                 double margin) {
    const cplx dir = base - center;
    const cplx entry = center + radius * (dir / std::abs(dir));
    std::vector<cplx> way{base};
    for (int guard = 0; guard < 8; ++guard) {
        const cplx cur = way.back();
        // nearest blocking puncture along cur -> entry
        double best_t = 2.0;
        cplx blocker = 0.0;
        bool found = false;
        for (const cplx& p : punctures) {
            if (std::abs(p - center) < 1e-12) continue;
            const cplx d = entry - cur;
            const double len2 = std::norm(d);
            if (len2 == 0.0) break;
            const double t = std::clamp(
                ((p - cur) / d).real(), 0.0, 1.0);
            const cplx foot = cur + t * d;
            if (std::abs(foot - p) < margin && t > 1e-9 && t < 1.0 - 1e-9 && t < best_t) {
                best_t = t;
                blocker = p;
                found = true;
            }
        }
        if (!found) break;
        const cplx d = (entry - cur) / std::abs(entry - cur);
        const cplx perp = cplx(0, 1) * d;
        // choose the detour side farther from the remaining punctures
        auto clearance_of = [&](cplx w) {
            double c = 1e300;
            for (const cplx& p : punctures)
                if (std::abs(p - center) > 1e-12) c = std::min(c, std::abs(w - p));
            return c;
        };
        const cplx w1 = blocker + 1.6 * margin * perp;
        const cplx w2 = blocker - 1.6 * margin * perp;
        way.push_back(clearance_of(w1) >= clearance_of(w2) ? w1 : w2);
    }
    way.push_back(entry);
    Path p;
    for (size_t i = 0; i + 1 < way.size(); ++i)
        p.segs.push_back(Path::line(way[i], way[i + 1]).segs[0]);
    const double th0 = std::arg(entry - center);
    p.segs.push_back(Path::arc(center, radius, th0, th0 + 2.0 * std::numbers::pi).segs[0]);
    for (size_t i = way.size(); i-- > 1;)
        p.segs.push_back(Path::line(way[i], way[i - 1]).segs[0]);
    return p;
}

}  // namespace

std::array<cplx, 3> balance_residual(std::span<const double> tau, std::span<const cplx> p) {
    cplx s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (size_t k = 0; k < tau.size(); ++k) {
        const double den = 1.0 - std::norm(p[k]);
        s1 += 2.0 * tau[k] * std::conj(p[k]) / den;
        s2 += tau[k] * (1.0 + std::norm(p[k])) / den;
        s3 += 2.0 * tau[k] * p[k] / den;
    }
    return {s1, s2, s3};
}

std::vector<cplx> nnoid_sample_lambdas(const BalanceConfig& cfg) {
    const int s = cfg.sample_pairs > 0 ? cfg.sample_pairs : 2 * cfg.degree + 2;
    std::vector<cplx> out;
    out.reserve(2 * s);
    for (int j = 0; j < s; ++j) {
        const cplx lam = std::polar(1.0, kPi * (j + 0.5) / s);  // upper half circle
        out.push_back(lam);
        // the star at lam reads the value at delta/conj(lam): lam itself on the
        // circle for delta=1, the antipode for delta=-1
        out.push_back(cfg.form.delta == 1 ? lam : -lam);
    }
    return out;
}

double nnoid_loop_radius(const BalanceConfig& cfg) {
    if (cfg.loop_radius > 0.0) return cfg.loop_radius;
    double r = 0.45;  // keep clear of the basepoint z = 0
    const size_t n = cfg.p.size();
    for (size_t j = 0; j < n; ++j) {
        r = std::min(r, 0.45 * std::abs(cfg.p[j]));
        for (size_t k = j + 1; k < n; ++k) r = std::min(r, 0.45 * std::abs(cfg.p[j] - cfg.p[k]));
    }
    return r;
}

std::vector<double> unitarity_residual(const NnoidParams& params, const BalanceConfig& cfg) {
    const Potential pot = nnoid_potential(params);
    const std::vector<cplx> lams = nnoid_sample_lambdas(cfg);
    const int n = params.ends();
    const int npts = static_cast<int>(lams.size());
    const double radius = nnoid_loop_radius(cfg);
    const Mat2 eta = cfg.form.eta();
    const Mat2 eta_inv = eta.inverse();

    std::vector<double> out;
    out.reserve(n * npts / 2 * 8);
    std::vector<cplx> centers(n);
    for (int k = 0; k < n; ++k) centers[k] = params.z[k][0];
    for (int k = 0; k < n; ++k) {
        const Path loop = routed_loop(centers, cplx(0.0), centers[k], radius, 0.8 * radius);
        const std::vector<Mat2> vals = integrate_values(pot, loop, lams, cfg.ode);
        // pairs (2j, 2j+1): star at lams[2j] needs the value at lams[2j+1]
        for (int j = 0; j + 1 < npts; j += 2) {
            const Mat2 x = vals[j + 1].conj_transpose().adjugate();
            const Mat2 st = cfg.form.epsilon == 1 ? x : eta * x * eta_inv;
            const Mat2 r = st - vals[j];
            out.push_back(r.a.real());
            out.push_back(r.a.imag());
            out.push_back(r.b.real());
            out.push_back(r.b.imag());
            out.push_back(r.c.real());
            out.push_back(r.c.imag());
            out.push_back(r.d.real());
            out.push_back(r.d.imag());
        }
    }
    return out;
}

namespace {

// One Newton solve at fixed t. Returns true on convergence.
bool newton_at_t(NnoidParams& params, const BalanceConfig& cfg, double t, SolveTrace& trace,
                 int* iterations) {
    params.t = t;
    std::vector<double> x;
    pack(params, x);
    const int np = static_cast<int>(x.size());

    std::vector<double> res = unitarity_residual(params, cfg);
    double rn = norm_inf(res);
    const int nr = static_cast<int>(res.size());
    int it = 0;
    for (; it < cfg.max_newton && rn > cfg.newton_tol; ++it) {
        // Finite-difference Jacobian, column by column.
        Eigen::MatrixXd jac(nr, np);
        for (int c = 0; c < np; ++c) {
            std::vector<double> xp = x;
            xp[c] += cfg.fd_step;
            NnoidParams pp = params;
            unpack(xp, pp);
            pp.t = t;
            const std::vector<double> rp = unitarity_residual(pp, cfg);
            for (int r = 0; r < nr; ++r) jac(r, c) = (rp[r] - res[r]) / cfg.fd_step;
        }
        Eigen::VectorXd rhs(nr);
        for (int r = 0; r < nr; ++r) rhs(r) = -res[r];
        Eigen::BDCSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        const Eigen::VectorXd step = svd.solve(rhs);

        // Damped update.
        double scale = 1.0;
        bool accepted = false;
        for (int half = 0; half < 8; ++half) {
            std::vector<double> xn = x;
            for (int c = 0; c < np; ++c) xn[c] += scale * step(c);
            NnoidParams pn = params;
            unpack(xn, pn);
            pn.t = t;
            std::vector<double> rn2 = unitarity_residual(pn, cfg);
            const double n2 = norm_inf(rn2);
            if (n2 < rn || n2 <= cfg.newton_tol) {
                x = std::move(xn);
                params = pn;
                res = std::move(rn2);
                rn = n2;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        trace.residual_norms.push_back(rn);
        if (!accepted) break;
    }
    if (iterations) *iterations = it;
    return rn <= cfg.newton_tol;
}

}  // namespace

NnoidSolution solve_nnoid(const BalanceConfig& cfg, double t_target) {
    if (cfg.tau.size() != cfg.p.size() || cfg.tau.empty())
        throw std::invalid_argument("solve_nnoid: tau and p must be nonempty and equal-sized");
    const auto bal = balance_residual(cfg.tau, cfg.p);
    const double balres =
        std::max({std::abs(bal[0]), std::abs(bal[1]), std::abs(bal[2])});
    if (balres > 1e-8)
        throw std::invalid_argument("solve_nnoid: configuration violates the balancing condition (" +
                                    std::to_string(balres) + ")");
    if (t_target < 0.0 || t_target > cfg.t_max)
        throw std::invalid_argument("solve_nnoid: t outside [0, t_max]");

    NnoidSolution out;
    out.params = NnoidParams::initial(cfg.tau, cfg.p, cfg.degree);
    out.params.t = 0.0;
    if (t_target == 0.0) {
        out.trace.converged = true;
        out.trace.message = "t = 0: initialization is exact";
        return out;
    }

    double t_cur = 0.0;
    double t_next = std::min(cfg.t_start, t_target);
    const double ratio = std::sqrt(10.0);
    NnoidParams good = out.params;
    while (t_cur < t_target) {
        NnoidParams attempt = good;
        int iters = 0;
        const bool ok = newton_at_t(attempt, cfg, t_next, out.trace, &iters);
        out.trace.newton_iterations.push_back(iters);
        if (ok) {
            good = attempt;
            t_cur = t_next;
            out.trace.t_steps.push_back(t_cur);
            t_next = std::min(t_target, t_cur * ratio);
            if (t_cur == t_target) break;
        } else {
            const double t_retry = 0.5 * (t_cur + t_next);
            if (t_retry - t_cur < 1e-7 * std::max(1.0, t_target)) {
                out.params = good;
                out.trace.converged = false;
                std::ostringstream os;
                os << "continuation stalled at t = " << t_cur << " (divergence at " << t_next
                   << ")";
                out.trace.message = os.str();
                return out;
            }
            t_next = t_retry;
        }
    }
    out.params = good;
    out.trace.converged = true;
    out.trace.message = "converged";
    return out;
}

}  // namespace loopcmc
