#include "mdi/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mdi/error.hpp"

namespace mdi {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = mix64(seed + kGolden) ^ mix64(stream_id + 2 * kGolden);
  bool all_zero = true;
  for (auto& s : state_) {
    x += kGolden;
    s = mix64(x);
    all_zero = all_zero && s == 0;
  }
  if (all_zero) state_[0] = kGolden;  // xoshiro state must not be all zero
}

RngStream RngStream::substream(std::uint64_t key) const {
  return RngStream(seed_, derive_stream_id(stream_id_, key, 0));
}

std::uint64_t derive_stream_id(std::uint64_t command, std::uint64_t cell,
                               std::uint64_t replicate) {
  std::uint64_t h = mix64(command + kGolden);
  h = mix64(h ^ (cell + 0xBF58476D1CE4E5B9ULL));
  h = mix64(h ^ (replicate + 0x94D049BB133111EBULL));
  return h;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw InvalidParameter("uniform_below: bound must be positive");
  // Lemire multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_pos();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

double draw_normal(RngStream& rng, double mean, double sd) {
  if (!std::isfinite(mean) || !std::isfinite(sd) || sd < 0.0)
    throw InvalidParameter("draw_normal: mean must be finite and sd finite and >= 0");
  if (sd == 0.0) return mean;
  return mean + sd * rng.standard_normal();
}

int draw_bernoulli(RngStream& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("draw_bernoulli: p must be in [0, 1]");
  return rng.uniform01() < p ? 1 : 0;
}

double draw_gamma(RngStream& rng, double shape, double scale) {
  if (!std::isfinite(shape) || !std::isfinite(scale) || shape <= 0.0 || scale <= 0.0)
    throw InvalidParameter("draw_gamma: shape and scale must be positive and finite");
  if (shape < 1.0) {
    const double u = rng.uniform_pos();
    return draw_gamma(rng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double draw_chisq(RngStream& rng, double df) {
  if (!std::isfinite(df) || df <= 0.0)
    throw InvalidParameter("draw_chisq: df must be positive and finite");
  return draw_gamma(rng, df / 2.0, 2.0);
}

double draw_scaled_inv_chisq(RngStream& rng, std::int64_t df, double scale) {
  if (df < 1) throw InvalidParameter("draw_scaled_inv_chisq: df must be >= 1");
  if (!std::isfinite(scale) || scale < 0.0)
    throw InvalidParameter("draw_scaled_inv_chisq: scale must be finite and >= 0");
  const double g = draw_chisq(rng, static_cast<double>(df));
  return static_cast<double>(df) * scale / g;
}

std::vector<double> draw_mvn(RngStream& rng, std::span<const double> mean, const Matrix& cov) {
  const std::size_t p = mean.size();
  if (cov.rows() != p || cov.cols() != p)
    throw DimensionMismatch("draw_mvn: covariance must be " + std::to_string(p) + "x" +
                            std::to_string(p));
  for (double v : mean)
    if (!std::isfinite(v)) throw InvalidParameter("draw_mvn: non-finite mean entry");
  const Matrix l = cholesky_psd(cov);
  std::vector<double> z(p);
  for (auto& v : z) v = rng.standard_normal();
  std::vector<double> out(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double v = mean[i];
    for (std::size_t k = 0; k <= i; ++k) v += l(i, k) * z[k];
    out[i] = v;
  }
  return out;
}

}  // namespace mdi
