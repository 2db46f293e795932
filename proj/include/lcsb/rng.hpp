#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lcsb {

// Counter-style seed mixing. Every source of randomness in the project is a
// named stream derived from a master seed, so adding a consumer never shifts
// the draws of an unrelated one.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t stream_seed(std::uint64_t master, std::string_view name);

// xoshiro256** generator with hand-rolled distributions. The standard
// library's distribution objects are implementation-defined, which would tie
// outputs to a libstdc++ version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();                      // [0, 1)
  double uniform(double lo, double hi);
  double normal();                         // Box-Muller
  double normal(double mean, double stddev);
  int uniform_int(int n);                  // [0, n), unbiased
  std::uint64_t uniform_u64(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_u64(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lcsb
