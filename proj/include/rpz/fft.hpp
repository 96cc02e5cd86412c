#ifndef RPZ_FFT_HPP
#define RPZ_FFT_HPP

#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace rpz::detail {

// FFTW planning is not thread-safe; execution on a private plan is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

/// Forward DFT X_k = sum_j x_j exp(-2 pi i j k / M).
inline std::vector<std::complex<double>> dft(std::vector<std::complex<double>> x)
{
    const int n = static_cast<int>(x.size());
    std::vector<std::complex<double>> out(x.size());
    if (n == 0) return out;
    auto* in_p = reinterpret_cast<fftw_complex*>(x.data());
    auto* out_p = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, in_p, out_p, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

} // namespace rpz::detail

#endif // RPZ_FFT_HPP
