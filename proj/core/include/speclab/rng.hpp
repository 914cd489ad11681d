#pragma once

#include <cstdint>

namespace speclab {

/// Counter-based pseudo-random stream. Output i of stream s is a pure
/// function of (seed, s, i): there is no hidden state beyond the counter,
/// so per-trial streams can be evaluated in any order or on any thread and
/// still produce identical draws. The mixer is the splitmix64 finalizer
/// driven by a Weyl sequence.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1).
  double uniform();

  /// Uniform draw in [a, b).
  double uniform(double a, double b);

  /// Standard normal draw (Box-Muller; consumes two uniforms per pair).
  double gaussian();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace speclab
