#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace eegprog {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Arr = Eigen::ArrayXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid field in a user-supplied configuration; message names the field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File-level failures: missing file, malformed row, bad magic.
class IoError : public Error {
 public:
  using Error::Error;
};

// Domain invariant violated: duplicate ids, channel-length mismatch.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Tensor/dimension mismatches.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Numeric guards: zero-norm embeddings, divergent training loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Refusal to train on a wiring whose leakage audit is non-empty.
class LeakageError : public Error {
 public:
  using Error::Error;
};

// Cohort cannot support the requested statistic (e.g. bootstrap budget
// exhausted while redrawing single-class resamples).
class DegenerateCohortError : public Error {
 public:
  using Error::Error;
};

// splitmix64: cheap stateless mixer used to derive independent stream seeds
// from (seed, index) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x51ed2701ULL));
}

// FNV-1a over a string, used for stable content digests in reports.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace eegprog
