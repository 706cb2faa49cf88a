#pragma once

#include "ensreg/dataset.hpp"
#include "ensreg/error.hpp"
#include "ensreg/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

inline std::vector<double> random_vector(ensreg::Rng& rng, std::size_t n, double lo = -10.0, double hi = 10.0)
{
    std::vector<double> v(n);
    for (auto& x : v)
        x = rng.uniform(lo, hi);
    return v;
}

inline ensreg::Matrix random_matrix(ensreg::Rng& rng, std::size_t rows, std::size_t cols)
{
    ensreg::Matrix x(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            x(r, c) = rng.uniform(-1.0, 1.0);
    return x;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() / ("ensreg_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path write(const std::string& name, const std::string& content) const
    {
        std::ofstream(path / name, std::ios::binary) << content;
        return path / name;
    }
};

template <typename F>
ensreg::ErrorCode error_code_of(F&& f)
{
    try {
        f();
    } catch (const ensreg::Error& e) {
        return e.code();
    }
    FAIL("expected an ensreg::Error");
    return ensreg::ErrorCode::InvalidArgument;
}

} // namespace testing
