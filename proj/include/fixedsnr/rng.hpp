#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace fixedsnr {

// Derives an independent generator from a master seed, a purpose label and
// a list of indices, so every random draw in a run has a stable address.
// Uniform and normal variates are produced here instead of through the
// standard distributions because those are not portable across libraries,
// and golden outputs must not depend on the toolchain.
class Stream {
 public:
  Stream(std::uint64_t master_seed, std::string_view purpose,
         std::initializer_list<std::uint64_t> indices = {});

  std::uint64_t next() { return engine_(); }
  double uniform();                       // [0, 1)
  std::uint64_t below(std::uint64_t n);   // uniform on [0, n)
  double normal();                        // N(0, 1)
  std::complex<double> complex_normal();  // CN(0, 1): E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose,
                          std::initializer_list<std::uint64_t> indices);

}  // namespace fixedsnr
