#include "loopcmc/loop.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "loopcmc/fft.hpp"

namespace loopcmc {

namespace {
int grid_size(int trunc) { return 4 * std::max(trunc, 1); }

cplx grid_point(int j, int m, double radius) {
    return std::polar(radius, 2.0 * std::numbers::pi * (j + 0.5) / m);
}
}  // namespace

std::string to_string(SpaceForm s) {
    switch (s) {
        case SpaceForm::S3: return "s3";
        case SpaceForm::AdS3: return "ads3";
        case SpaceForm::H3: return "h3";
        case SpaceForm::dS3: return "ds3";
    }
    return "?";
}

SpaceForm space_form_from_string(const std::string& name) {
    if (name == "s3" || name == "S3") return SpaceForm::S3;
    if (name == "ads3" || name == "AdS3") return SpaceForm::AdS3;
    if (name == "h3" || name == "H3") return SpaceForm::H3;
    if (name == "ds3" || name == "dS3") return SpaceForm::dS3;
    throw std::invalid_argument("unknown space form: " + name);
}

RealForm RealForm::of(SpaceForm s) {
    switch (s) {
        case SpaceForm::S3: return {s, 1, 1};
        case SpaceForm::AdS3: return {s, 1, -1};
        case SpaceForm::H3: return {s, -1, 1};
        case SpaceForm::dS3: return {s, -1, -1};
    }
    throw std::logic_error("bad space form");
}

// ---------------------------------------------------------------- ScalarLoop

ScalarLoop::ScalarLoop(std::vector<cplx> coeffs, double radius)
    : trunc_((static_cast<int>(coeffs.size()) - 1) / 2),
      radius_(radius),
      coeffs_(std::move(coeffs)) {
    if (coeffs_.size() % 2 == 0) throw std::invalid_argument("ScalarLoop: even coeff count");
    if (radius_ <= 0) throw std::invalid_argument("ScalarLoop: radius must be positive");
    samples_ = detail::coeffs_to_samples(coeffs_, grid_size(trunc_), radius_);
}

ScalarLoop ScalarLoop::constant(cplx v, int trunc, double radius) {
    std::vector<cplx> c(2 * trunc + 1, cplx(0.0));
    c[trunc] = v;
    return ScalarLoop(std::move(c), radius);
}

ScalarLoop ScalarLoop::term(int k, cplx v, double radius) {
    const int n = std::abs(k);
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    c[k + n] = v;
    return ScalarLoop(std::move(c), radius);
}

ScalarLoop ScalarLoop::from_coeffs(std::vector<cplx> coeffs, double radius) {
    return ScalarLoop(std::move(coeffs), radius);
}

ScalarLoop ScalarLoop::from_samples(const std::vector<cplx>& samples, int trunc, double radius) {
    return ScalarLoop(detail::samples_to_coeffs(samples, trunc, radius), radius);
}

cplx ScalarLoop::coeff(int k) const {
    if (k < -trunc_ || k > trunc_) return 0.0;
    return coeffs_[k + trunc_];
}

cplx ScalarLoop::sample_point(int j) const { return grid_point(j, num_samples(), radius_); }

cplx ScalarLoop::eval(cplx lambda) const {
    cplx pos = 0.0, neg = 0.0;
    for (int k = trunc_; k >= 1; --k) pos = (pos + coeffs_[k + trunc_]) * lambda;
    if (lambda == cplx(0.0)) {
        const double cut = 1e-12 * std::max(max_abs(), 1e-300);
        for (int k = -trunc_; k <= -1; ++k)
            if (std::abs(coeffs_[k + trunc_]) > cut)
                throw std::invalid_argument("ScalarLoop::eval: pole at lambda = 0");
        return coeffs_[trunc_];
    }
    const cplx li = 1.0 / lambda;
    for (int k = -trunc_; k <= -1; ++k) neg = (neg + coeffs_[k + trunc_]) * li;
    return pos + neg + coeffs_[trunc_];
}

double ScalarLoop::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

ScalarLoop ScalarLoop::retrunc(int n) const {
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    for (int k = -n; k <= n; ++k) c[k + n] = coeff(k);
    return ScalarLoop(std::move(c), radius_);
}

int ScalarLoop::effective_trunc(double tol) const {
    const double cut = tol * std::max(max_abs(), 1e-300);
    int n = 0;
    for (int k = -trunc_; k <= trunc_; ++k)
        if (std::abs(coeffs_[k + trunc_]) > cut) n = std::max(n, std::abs(k));
    return n;
}

ScalarLoop smul(const ScalarLoop& f, const ScalarLoop& g) {
    if (f.radius() != g.radius()) throw std::invalid_argument("smul: radius mismatch");
    const int n = f.trunc() + g.trunc();
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    for (int i = -f.trunc(); i <= f.trunc(); ++i) {
        const cplx fi = f.coeff(i);
        if (fi == cplx(0.0)) continue;
        for (int j = -g.trunc(); j <= g.trunc(); ++j) c[i + j + n] += fi * g.coeff(j);
    }
    return ScalarLoop::from_coeffs(std::move(c), f.radius());
}

ScalarLoop sadd(const ScalarLoop& f, const ScalarLoop& g) {
    if (f.radius() != g.radius()) throw std::invalid_argument("sadd: radius mismatch");
    const int n = std::max(f.trunc(), g.trunc());
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    for (int k = -n; k <= n; ++k) c[k + n] = f.coeff(k) + g.coeff(k);
    return ScalarLoop::from_coeffs(std::move(c), f.radius());
}

ScalarLoop sscale(const ScalarLoop& f, cplx s) {
    std::vector<cplx> c = f.coeffs();
    for (auto& v : c) v *= s;
    return ScalarLoop::from_coeffs(std::move(c), f.radius());
}

ScalarLoop sstar(const ScalarLoop& f, int delta) {
    if (f.radius() != 1.0) throw std::invalid_argument("sstar: radius must be 1");
    // conj(f(delta/conj lambda)): coefficient k -> conj(c_{-k}) delta^{-k}... do it
    // coefficient-wise: f*(lambda) = sum_k conj(c_k) delta^k lambda^{-k}.
    const int n = f.trunc();
    std::vector<cplx> c(2 * n + 1, cplx(0.0));
    for (int k = -n; k <= n; ++k) {
        const double dk = (delta == 1 || k % 2 == 0) ? 1.0 : -1.0;
        c[-k + n] = std::conj(f.coeff(k)) * dk;
    }
    return ScalarLoop::from_coeffs(std::move(c), 1.0);
}

int winding_number(const ScalarLoop& f) {
    const auto& s = f.samples();
    const int m = static_cast<int>(s.size());
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        const cplx r = s[(j + 1) % m] / s[j];
        total += std::arg(r);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

ScalarLoop sexp(const ScalarLoop& f, int trunc) {
    const int n = trunc < 0 ? f.trunc() : trunc;
    const int m = grid_size(n);
    std::vector<cplx> s(m);
    for (int j = 0; j < m; ++j) s[j] = std::exp(f.eval(grid_point(j, m, f.radius())));
    return ScalarLoop::from_samples(s, n, f.radius());
}

// ---------------------------------------------------------------- MatrixLoop

namespace {
std::vector<cplx> pick_entry(const std::vector<Mat2>& v, int row, int col) {
    std::vector<cplx> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        const Mat2& m = v[i];
        out[i] = row == 0 ? (col == 0 ? m.a : m.b) : (col == 0 ? m.c : m.d);
    }
    return out;
}
}  // namespace

MatrixLoop::MatrixLoop(std::vector<Mat2> coeffs, double radius, double spill)
    : trunc_((static_cast<int>(coeffs.size()) - 1) / 2),
      radius_(radius),
      spill_(spill),
      coeffs_(std::move(coeffs)) {
    if (coeffs_.size() % 2 == 0) throw std::invalid_argument("MatrixLoop: even coeff count");
    if (radius_ <= 0) throw std::invalid_argument("MatrixLoop: radius must be positive");
    const int m = grid_size(trunc_);
    samples_.resize(m);
    for (int rc = 0; rc < 4; ++rc) {
        const int r = rc / 2, c = rc % 2;
        auto s = detail::coeffs_to_samples(pick_entry(coeffs_, r, c), m, radius_);
        for (int j = 0; j < m; ++j) {
            Mat2& mm = samples_[j];
            (r == 0 ? (c == 0 ? mm.a : mm.b) : (c == 0 ? mm.c : mm.d)) = s[j];
        }
    }
}

MatrixLoop MatrixLoop::identity(int trunc, double radius) {
    return constant(Mat2::identity(), trunc, radius);
}

MatrixLoop MatrixLoop::constant(const Mat2& m, int trunc, double radius) {
    std::vector<Mat2> c(2 * trunc + 1, Mat2::zero());
    c[trunc] = m;
    return MatrixLoop(std::move(c), radius, 0.0);
}

MatrixLoop MatrixLoop::term(int k, const Mat2& m, double radius) {
    const int n = std::abs(k);
    std::vector<Mat2> c(2 * n + 1, Mat2::zero());
    c[k + n] = m;
    return MatrixLoop(std::move(c), radius, 0.0);
}

MatrixLoop MatrixLoop::from_coeffs(std::vector<Mat2> coeffs, double radius) {
    return MatrixLoop(std::move(coeffs), radius, 0.0);
}

MatrixLoop MatrixLoop::from_samples(const std::vector<Mat2>& samples, int trunc, double radius) {
    const int m = static_cast<int>(samples.size());
    std::vector<Mat2> coeffs(2 * trunc + 1, Mat2::zero());
    for (int rc = 0; rc < 4; ++rc) {
        const int r = rc / 2, c = rc % 2;
        auto cs = detail::samples_to_coeffs(pick_entry(samples, r, c), trunc, radius);
        for (int k = 0; k < 2 * trunc + 1; ++k) {
            Mat2& mm = coeffs[k];
            (r == 0 ? (c == 0 ? mm.a : mm.b) : (c == 0 ? mm.c : mm.d)) = cs[k];
        }
    }
    if (m != grid_size(trunc)) return MatrixLoop(std::move(coeffs), radius, 0.0);
    MatrixLoop out(std::move(coeffs), radius, 0.0);
    out.samples_ = samples;  // keep caller's samples bit-exactly
    return out;
}

const Mat2& MatrixLoop::coeff(int k) const {
    static const Mat2 zero{};
    if (k < -trunc_ || k > trunc_) return zero;
    return coeffs_[k + trunc_];
}

cplx MatrixLoop::sample_point(int j) const { return grid_point(j, num_samples(), radius_); }

Mat2 MatrixLoop::eval(cplx lambda) const {
    Mat2 pos = Mat2::zero(), neg = Mat2::zero();
    for (int k = trunc_; k >= 1; --k) pos = (pos + coeffs_[k + trunc_]) * lambda;
    if (lambda == cplx(0.0)) {
        const double cut = 1e-12 * std::max(max_abs(), 1e-300);
        for (int k = -trunc_; k <= -1; ++k)
            if (coeffs_[k + trunc_].max_abs() > cut)
                throw std::invalid_argument("MatrixLoop::eval: pole at lambda = 0");
        return pos + coeffs_[trunc_];
    }
    const cplx li = 1.0 / lambda;
    for (int k = -trunc_; k <= -1; ++k) neg = (neg + coeffs_[k + trunc_]) * li;
    return pos + neg + coeffs_[trunc_];
}

double MatrixLoop::eval_condition(cplx lambda) const {
    double num = 0.0;
    const double r = std::abs(lambda);
    for (int k = -trunc_; k <= trunc_; ++k) num += coeffs_[k + trunc_].norm() * std::pow(r, k);
    const double den = std::max(eval(lambda).norm(), 1e-300);
    return num / den;
}

double MatrixLoop::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, c.max_abs());
    return m;
}

double MatrixLoop::det_drift() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, std::abs(s.det() - 1.0));
    return m;
}

int MatrixLoop::effective_trunc(double tol) const {
    const double cut = tol * std::max(max_abs(), 1e-300);
    int n = 0;
    for (int k = -trunc_; k <= trunc_; ++k)
        if (coeffs_[k + trunc_].max_abs() > cut) n = std::max(n, std::abs(k));
    return n;
}

MatrixLoop MatrixLoop::retrunc(int n) const {
    std::vector<Mat2> c(2 * n + 1, Mat2::zero());
    double dropped = 0.0;
    for (int k = -trunc_; k <= trunc_; ++k) {
        if (std::abs(k) <= n)
            c[k + n] = coeffs_[k + trunc_];
        else
            dropped += coeffs_[k + trunc_].norm() * coeffs_[k + trunc_].norm();
    }
    return MatrixLoop(std::move(c), radius_, std::sqrt(dropped));
}

ScalarLoop MatrixLoop::entry(int row, int col) const {
    return ScalarLoop::from_coeffs(pick_entry(coeffs_, row, col), radius_);
}

MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b) {
    return mul(a, b, std::max(a.trunc(), b.trunc()));
}

MatrixLoop mul(const MatrixLoop& a, const MatrixLoop& b, int out_trunc) {
    if (a.radius() != b.radius()) throw std::invalid_argument("mul: radius mismatch");
    const int n = a.trunc() + b.trunc();
    std::vector<Mat2> c(2 * n + 1, Mat2::zero());
    for (int i = -a.trunc(); i <= a.trunc(); ++i) {
        const Mat2& ai = a.coeff(i);
        if (ai.max_abs() == 0.0) continue;
        for (int j = -b.trunc(); j <= b.trunc(); ++j) c[i + j + n] += ai * b.coeff(j);
    }
    MatrixLoop full = MatrixLoop::from_coeffs(std::move(c), a.radius());
    return out_trunc >= n ? full : full.retrunc(out_trunc);
}

MatrixLoop mul_const(const Mat2& cst, const MatrixLoop& a) {
    std::vector<Mat2> c = a.coeffs();
    for (auto& m : c) m = cst * m;
    return MatrixLoop::from_coeffs(std::move(c), a.radius());
}

MatrixLoop mul_const(const MatrixLoop& a, const Mat2& cst) {
    std::vector<Mat2> c = a.coeffs();
    for (auto& m : c) m = m * cst;
    return MatrixLoop::from_coeffs(std::move(c), a.radius());
}

MatrixLoop star(const MatrixLoop& a, const RealForm& form) {
    if (a.radius() != 1.0)
        throw std::invalid_argument("star: radius must be 1 (sub-unit radii are handled by the dressing code)");
    const int m = a.num_samples();
    const Mat2 eta = form.eta();
    const Mat2 eta_inv = eta.inverse();
    std::vector<Mat2> out(m);
    for (int j = 0; j < m; ++j) {
        // delta/conj(lambda_j) on the unit circle: lambda_j for delta=1, -lambda_j else.
        const int src = form.delta == 1 ? j : (j + m / 2) % m;
        const Mat2 x = a.samples()[src].conj_transpose().adjugate();
        out[j] = form.epsilon == 1 ? x : eta * x * eta_inv;
    }
    return MatrixLoop::from_samples(out, a.trunc(), 1.0);
}

MatrixLoop inverse(const MatrixLoop& a, double det_tol) {
    const double drift = a.det_drift();
    if (drift > det_tol)
        throw std::invalid_argument("inverse: determinant drift " + std::to_string(drift));
    std::vector<Mat2> out(a.num_samples());
    for (int j = 0; j < a.num_samples(); ++j) out[j] = a.samples()[j].adjugate();
    return MatrixLoop::from_samples(out, a.trunc(), a.radius());
}

UnitarityResult is_unitary(const MatrixLoop& a, const RealForm& form, double tol) {
    const MatrixLoop s = star(a, form);
    double r = 0.0;
    for (int j = 0; j < a.num_samples(); ++j)
        r = std::max(r, (s.samples()[j] - a.samples()[j]).norm());
    return {r <= tol, r};
}

}  // namespace loopcmc
