#include "fastloc/heatmap.hpp"

#include <cmath>
#include <fstream>

namespace fastloc {

GrayImage to_gray(const ScalarField& f) {
  const int n = f.shape().n();
  GrayImage img{n, n, std::vector<std::uint8_t>(f.size(), 0)};
  const double lo = f.min();
  const double hi = f.max();
  if (!(hi > lo)) return img;
  const double scale = 255.0 / (hi - lo);
  for (std::size_t i = 0; i < f.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::lround((f[i] - lo) * scale));
  return img;
}

void overlay(GrayImage& img, const std::vector<GridPoint>& marks, const std::vector<GridPoint>& centers) {
  auto put = [&](GridPoint p, std::uint8_t v) {
    if (p.x >= 0 && p.x < img.height && p.y >= 0 && p.y < img.width)
      img.pixels[static_cast<std::size_t>(p.x) * img.width + p.y] = v;
  };
  for (auto p : centers) put(p, 0);
  for (auto p : marks) put(p, 255);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0 || maxval != 255) throw Error("unsupported PGM header");
  in.get();
  GrayImage img{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw Error("truncated PGM payload");
  return img;
}

void render_heatmap(const ScalarField& f, const std::filesystem::path& path, const std::vector<GridPoint>& minima,
                    const std::vector<GridPoint>& centers) {
  auto img = to_gray(f);
  overlay(img, minima, centers);
  write_pgm(path, img);
}

}  // namespace fastloc
