#include "critline/detail/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace critline::detail {

void ensure_fft_thread_safety() {
  static std::once_flag once;
  std::call_once(once, [] { fftw_make_planner_thread_safe(); });
}

}  // namespace critline::detail
