#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "numeric.hpp"

namespace expsum {

/// out[k] = sum_j in[j] e(jk/n), i.e. the unnormalized inverse DFT.
inline std::vector<ComplexVal> dft_positive(std::vector<ComplexVal> in) {
  const int n = static_cast<int>(in.size());
  std::vector<ComplexVal> out(in.size());
  if (n == 0) return out;
  static std::mutex planner_mutex;  // the FFTW planner is not reentrant
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                            reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace expsum
