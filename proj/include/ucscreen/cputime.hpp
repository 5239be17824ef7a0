#pragma once

#include <chrono>
#include <ctime>

namespace ucscreen {

// CPU time consumed by the calling thread, in seconds.
inline double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

// Accumulates thread CPU time and wall time over a scope.
class CpuStopwatch {
 public:
  CpuStopwatch() : cpu0_(thread_cpu_seconds()), wall0_(std::chrono::steady_clock::now()) {}
  double cpu() const { return thread_cpu_seconds() - cpu0_; }
  double wall() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0_).count();
  }

 private:
  double cpu0_;
  std::chrono::steady_clock::time_point wall0_;
};

}  // namespace ucscreen
