#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace invmeas {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Cx = std::complex<double>;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Independent generator for (seed, stream). Streams with the same seed do not
// overlap in practice: the mt19937_64 state is derived from a splitmix64 walk
// keyed by both values.
inline std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t s = seed ^ (0xd1342543de82ef95ull * (stream + 1));
  std::seed_seq seq{
      static_cast<std::uint32_t>(detail::splitmix64(s) >> 32),
      static_cast<std::uint32_t>(detail::splitmix64(s)),
      static_cast<std::uint32_t>(detail::splitmix64(s) >> 32),
      static_cast<std::uint32_t>(detail::splitmix64(s)),
      static_cast<std::uint32_t>(detail::splitmix64(s) >> 32),
      static_cast<std::uint32_t>(detail::splitmix64(s)),
  };
  return std::mt19937_64(seq);
}

}  // namespace invmeas
