#ifndef ALPHASMC_RNG_HPP
#define ALPHASMC_RNG_HPP

#include <cstdint>
#include <cmath>

namespace alphasmc {

/// Purpose tag of a random stream. Every random draw in the library comes
/// from a stream keyed on (root seed, replicate, time index, particle index,
/// purpose), so results do not depend on evaluation order or thread count.
enum class Draw : std::uint64_t {
  Init = 1,
  Ancestor = 2,
  Kernel = 3,
  Graph = 4,
  Observation = 5,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

}  // namespace detail

/// Counter-based random stream. Construction hashes the key into a 64-bit
/// state; draws advance a splitmix64 sequence from there.
class RngStream {
 public:
  RngStream(std::uint64_t root, std::uint64_t replicate, std::uint64_t t,
            std::uint64_t i, Draw purpose) {
    std::uint64_t s = detail::mix(root, 0x5ca1ab1e0ddba11ULL);
    s = detail::mix(s, replicate);
    s = detail::mix(s, t);
    s = detail::mix(s, i);
    state_ = detail::mix(s, static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// Uniform draw in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller, pairs cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace alphasmc

#endif
