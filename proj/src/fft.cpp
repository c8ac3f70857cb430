#include "fastloc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace fastloc {
namespace {

// FFTW planning is not thread-safe, execution of an existing plan is. Plans
// are created once per (n, direction) under a lock and never destroyed.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* probe = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, probe, probe, sign, FFTW_ESTIMATE);
    fftw_free(probe);
    if (!p) throw Error("FFTW failed to create a plan for n=" + std::to_string(n));
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

// Aligned scratch matching the alignment the plans were created with.
class Workspace {
 public:
  explicit Workspace(std::size_t size) : data_(fftw_alloc_complex(size)) {
    if (!data_) throw Error("FFT workspace allocation failed");
  }
  fftw_complex* get() { return data_.get(); }
  std::complex<double>* as_complex() { return reinterpret_cast<std::complex<double>*>(data_.get()); }

 private:
  std::unique_ptr<fftw_complex, FftwDeleter> data_;
};

void execute(int n, int sign, Workspace& ws) {
  fftw_execute_dft(plans().get(n, sign), ws.get(), ws.get());
}

}  // namespace

SpectralField fft2(const ScalarField& f) {
  const auto& shape = f.shape();
  Workspace ws(shape.size());
  auto* buf = ws.as_complex();
  for (std::size_t i = 0; i < f.size(); ++i) buf[i] = f[i];
  execute(shape.n(), FFTW_FORWARD, ws);
  SpectralField out(shape);
  const double w = shape.h() * shape.h();
  for (std::size_t i = 0; i < f.size(); ++i) out.coeffs[i] = w * buf[i];
  return out;
}

std::vector<std::complex<double>> ifft2_complex(const SpectralField& F) {
  const auto& shape = F.shape;
  Workspace ws(shape.size());
  auto* buf = ws.as_complex();
  std::copy(F.coeffs.begin(), F.coeffs.end(), buf);
  execute(shape.n(), FFTW_BACKWARD, ws);
  const double L = shape.length();
  const double w = 1.0 / (L * L);
  std::vector<std::complex<double>> out(shape.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w * buf[i];
  return out;
}

ScalarField ifft2(const SpectralField& F) {
  auto c = ifft2_complex(F);
  ScalarField out(F.shape);
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

SpectralField apply_multiplier(const SpectralField& F, const SymbolTable& m) {
  if (!(F.shape == m.shape)) throw Error("apply_multiplier: shape mismatch");
  SpectralField out(F.shape);
  for (std::size_t i = 0; i < F.coeffs.size(); ++i) out.coeffs[i] = F.coeffs[i] * m.values[i];
  return out;
}

void filter_values(const GridShape& shape, std::span<const double> in, std::span<const double> multiplier,
                   std::span<double> out) {
  const std::size_t size = shape.size();
  if (in.size() != size || out.size() != size || multiplier.size() != size)
    throw Error("filter_values: buffer length does not match grid");
  Workspace ws(size);
  auto* buf = ws.as_complex();
  for (std::size_t i = 0; i < size; ++i) buf[i] = in[i];
  execute(shape.n(), FFTW_FORWARD, ws);
  // the h^2 forward weight and 1/(nh)^2 inverse weight combine to 1/n^2
  const double w = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) buf[i] *= w * multiplier[i];
  execute(shape.n(), FFTW_BACKWARD, ws);
  for (std::size_t i = 0; i < size; ++i) out[i] = buf[i].real();
}

ScalarField filter_field(const ScalarField& f, const SymbolTable& m) {
  if (!(f.shape() == m.shape)) throw Error("filter_field: shape mismatch");
  ScalarField out(f.shape());
  filter_values(f.shape(), f.values(), m.values, out.values());
  return out;
}

}  // namespace fastloc
