#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnemo {

using Vector = std::vector<double>;
using MemoryId = std::int64_t;
using FactId = std::int64_t;
using EntityId = std::string;

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
  public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                std::to_string(actual))
    {}
};

class NotFound : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// Raised when another writer holds the store lock.
class BusyError : public Error {
  public:
    using Error::Error;
};

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

inline bool all_finite(std::span<const double> a)
{
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

inline void require_same_dim(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
}

} // namespace vec
} // namespace mnemo
