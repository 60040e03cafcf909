#include "loopcmc/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace loopcmc::detail {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_complex* buf = nullptr;
    int size = 0;
};

std::mutex g_fft_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair& plan_for(int m) {
    auto& cache = plan_cache();
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    PlanPair p;
    p.size = m;
    p.buf = fftw_alloc_complex(static_cast<size_t>(m));
    p.forward = fftw_plan_dft_1d(m, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_1d(m, p.buf, p.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    return cache.emplace(m, p).first->second;
}

}  // namespace

std::vector<cplx> samples_to_coeffs(const std::vector<cplx>& samples, int trunc, double radius) {
    const int m = static_cast<int>(samples.size());
    if (m < 2 * trunc + 1)
        throw std::invalid_argument("samples_to_coeffs: grid too coarse for truncation");
    std::vector<cplx> dft(m);
    {
        std::lock_guard<std::mutex> lock(g_fft_mutex);
        PlanPair& p = plan_for(m);
        std::memcpy(p.buf, samples.data(), sizeof(cplx) * m);
        fftw_execute(p.forward);
        std::memcpy(dft.data(), p.buf, sizeof(cplx) * m);
    }
    std::vector<cplx> coeffs(2 * trunc + 1);
    const double pi = std::numbers::pi;
    for (int k = -trunc; k <= trunc; ++k) {
        const int bin = ((k % m) + m) % m;
        const cplx twiddle = std::polar(1.0, -pi * k / m);
        coeffs[k + trunc] = dft[bin] * twiddle / (double(m) * std::pow(radius, k));
    }
    return coeffs;
}

std::vector<cplx> coeffs_to_samples(const std::vector<cplx>& coeffs, int num_samples, double radius) {
    const int m = num_samples;
    const int trunc = (static_cast<int>(coeffs.size()) - 1) / 2;
    if (m < 2 * trunc + 1)
        throw std::invalid_argument("coeffs_to_samples: grid too coarse for truncation");
    const double pi = std::numbers::pi;
    std::vector<cplx> bins(m, cplx(0.0));
    for (int k = -trunc; k <= trunc; ++k) {
        const int bin = ((k % m) + m) % m;
        bins[bin] += coeffs[k + trunc] * std::pow(radius, k) * std::polar(1.0, pi * k / m);
    }
    std::vector<cplx> out(m);
    {
        std::lock_guard<std::mutex> lock(g_fft_mutex);
        PlanPair& p = plan_for(m);
        std::memcpy(p.buf, bins.data(), sizeof(cplx) * m);
        fftw_execute(p.backward);
        std::memcpy(out.data(), p.buf, sizeof(cplx) * m);
    }
    return out;
}

}  // namespace loopcmc::detail
