#pragma once

#include <filesystem>

#include "fastloc/grid.hpp"

namespace fastloc {

// LSF1 layout: ASCII header "LSF1 n=<n> h=<decimal>\n" followed by n*n
// little-endian binary64 values in row-major order.

void write_field(const std::filesystem::path& path, const ScalarField& f);

/// The unit convention is recovered from h (1/n -> domain, 1 -> lattice).
ScalarField read_field(const std::filesystem::path& path);

}  // namespace fastloc
