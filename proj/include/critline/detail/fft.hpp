#pragma once

// Eigen's FFT module, routed to the FFTW backend. Every translation unit that
// touches Eigen::FFT must include this header instead of the Eigen one so
// the backend choice stays consistent.
#ifndef EIGEN_FFTW_DEFAULT
#define EIGEN_FFTW_DEFAULT
#endif
#include <unsupported/Eigen/FFT>

namespace critline::detail {

/// Makes the FFTW planner safe to call from several threads. Idempotent.
void ensure_fft_thread_safety();

}  // namespace critline::detail
