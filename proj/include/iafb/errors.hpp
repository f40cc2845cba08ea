#pragma once

#include <stdexcept>
#include <string>

namespace iafb {

// Base for every error raised by the library. Callers that only need to know
// "the simulation rejected this input" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("vector norm is numerically zero") {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what)
      : Error("dimension mismatch: " + what) {}
};

class UnsupportedDims : public Error {
 public:
  UnsupportedDims(int m, int n)
      : Error("unsupported antenna configuration M=" + std::to_string(m) +
              ", N=" + std::to_string(n) + " (only M=2, N=3 is supported)") {}
};

class AlignmentInfeasible : public Error {
 public:
  AlignmentInfeasible() : Error("alignment system has an empty null space") {}
};

class TooManyBits : public Error {
 public:
  explicit TooManyBits(int bits)
      : Error("codebook size 2^" + std::to_string(bits) +
              " exceeds the 2^24 limit") {}
};

class DegenerateDecomposition : public Error {
 public:
  DegenerateDecomposition()
      : Error("quantized vector coincides with the target; error direction "
              "is undefined") {}
};

class InvalidTau : public Error {
 public:
  explicit InvalidTau(double tau)
      : Error("tau must exceed 1, got " + std::to_string(tau)) {}
};

class DegenerateGrid : public Error {
 public:
  DegenerateGrid() : Error("need at least two distinct SNR points") {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace iafb
