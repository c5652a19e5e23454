#pragma once

// Hand-rolled generators and helpers shared by the unit tests.

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mnemo/common.hpp"

namespace testing {

using mnemo::Vector;

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    Vector normal_vector(std::size_t d)
    {
        Vector v(d);
        for (double& x : v) x = normal();
        return v;
    }

    Vector unit_vector(std::size_t d)
    {
        Vector v = normal_vector(d);
        const double n = mnemo::vec::norm(v);
        for (double& x : v) x /= n;
        return v;
    }

    /// Uniform direction, radius uniform in [0, max_radius].
    Vector ball_vector(std::size_t d, double max_radius)
    {
        Vector v = unit_vector(d);
        const double r = uniform(0.0, max_radius);
        for (double& x : v) x *= r;
        return v;
    }
};

/// Fresh empty directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        static std::mt19937_64 r(std::random_device{}());
        path = std::filesystem::temp_directory_path() / ("mnemo-test-" + std::to_string(r()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline double max_abs_diff(const Vector& a, const Vector& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing
