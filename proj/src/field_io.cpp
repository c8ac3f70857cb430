#include "fastloc/field_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fastloc {
namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
}

std::string format_h(double h) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), h);
  return std::string(buf, end);
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "LSF1 n=" << f.shape().n() << " h=" << format_h(f.shape().h()) << '\n';
  std::vector<std::uint64_t> raw(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) raw[i] = to_little(std::bit_cast<std::uint64_t>(f[i]));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string header;
  if (!std::getline(in, header)) throw Error("malformed header: empty file");

  std::istringstream hs(header);
  std::string magic, ntok, htok, extra;
  hs >> magic >> ntok >> htok;
  if (magic != "LSF1" || ntok.rfind("n=", 0) != 0 || htok.rfind("h=", 0) != 0 || (hs >> extra))
    throw Error("malformed header: '" + header + "'");

  int n = 0;
  double h = 0.0;
  {
    const char* b = ntok.data() + 2;
    const char* e = ntok.data() + ntok.size();
    auto r = std::from_chars(b, e, n);
    if (r.ec != std::errc() || r.ptr != e) throw Error("malformed header: bad n in '" + header + "'");
  }
  {
    const char* b = htok.data() + 2;
    const char* e = htok.data() + htok.size();
    auto r = std::from_chars(b, e, h);
    if (r.ec != std::errc() || r.ptr != e) throw Error("malformed header: bad h in '" + header + "'");
  }
  if (n < 4) throw Error("malformed header: n must be >= 4");

  UnitConvention conv;
  if (h == 1.0)
    conv = UnitConvention::Lattice;
  else if (h == 1.0 / n)
    conv = UnitConvention::Domain;
  else
    throw Error("malformed header: h=" + htok.substr(2) + " matches neither 1/n nor 1");
  GridShape shape(n, conv);

  std::vector<std::uint64_t> raw(shape.size());
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)))
    throw Error("size mismatch: payload shorter than n*n values");
  if (in.peek() != std::char_traits<char>::eof())
    throw Error("size mismatch: trailing bytes after n*n values");

  std::vector<double> values(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) values[i] = std::bit_cast<double>(to_little(raw[i]));
  ScalarField f(shape, std::move(values));
  if (!f.all_finite()) throw Error("non-finite value in '" + path.string() + "'");
  return f;
}

}  // namespace fastloc
