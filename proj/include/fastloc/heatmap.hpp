#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fastloc/grid.hpp"

namespace fastloc {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Linear map [min, max] -> [0, 255]; a constant field maps to 0.
GrayImage to_gray(const ScalarField& f);

/// Paints `marks` white and `centers` black on top of an image.
void overlay(GrayImage& img, const std::vector<GridPoint>& marks, const std::vector<GridPoint>& centers);

/// Binary PGM (P5). Row x of the field becomes image row x.
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage read_pgm(const std::filesystem::path& path);

void render_heatmap(const ScalarField& f, const std::filesystem::path& path,
                    const std::vector<GridPoint>& minima = {}, const std::vector<GridPoint>& centers = {});

}  // namespace fastloc
