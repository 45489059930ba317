// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Thin RAII layer over FFTW's complex DFTs. Unnormalized in both directions,
// matching FFTW: forward uses exp(-2 pi i jk/N), backward exp(+2 pi i jk/N).

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

#include "eprcrit/error.hpp"
#include "eprcrit/matrix.hpp"

namespace eprcrit::fft {

enum class Sign { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

namespace detail {

// Planner calls are not thread-safe in FFTW; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {
    if (plan_ == nullptr) throw Error(ErrorCode::InvalidArgument, "FFTW could not create a plan");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

/// In-place 2D transform of a row-major matrix.
inline void transform(Matrix<std::complex<double>>& data, Sign sign) {
  if (data.empty()) return;
  fftw_plan raw;
  {
    std::lock_guard lock(detail::planner_mutex());
    raw = fftw_plan_dft_2d(static_cast<int>(data.rows()), static_cast<int>(data.cols()), detail::as_fftw(data.data()),
                           detail::as_fftw(data.data()), static_cast<int>(sign), FFTW_ESTIMATE);
  }
  detail::Plan(raw).execute();
}

/// In-place 1D transform.
inline void transform(std::span<std::complex<double>> data, Sign sign) {
  if (data.empty()) return;
  fftw_plan raw;
  {
    std::lock_guard lock(detail::planner_mutex());
    raw = fftw_plan_dft_1d(static_cast<int>(data.size()), detail::as_fftw(data.data()), detail::as_fftw(data.data()),
                           static_cast<int>(sign), FFTW_ESTIMATE);
  }
  detail::Plan(raw).execute();
}

}  // namespace eprcrit::fft
