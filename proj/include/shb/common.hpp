#ifndef SHB_COMMON_HPP
#define SHB_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace shb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when an oracle produces a non-finite value or gradient.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, int component_index)
      : std::runtime_error(what), component(component_index) {}
  int component;
};

// Raised on malformed input files; line is 1-based.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, long line_number)
      : std::runtime_error(what + " at line " + std::to_string(line_number)),
        line(line_number) {}
  long line;
};

class config_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// splitmix64; used to derive independent per-run RNG streams from
// (master seed, run index) without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace shb

#endif  // SHB_COMMON_HPP
