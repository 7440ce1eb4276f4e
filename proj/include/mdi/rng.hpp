#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdi/matrix.hpp"

namespace mdi {

// Deterministic stream of draws. The state is xoshiro256++ seeded through a
// splitmix64 hash of (seed, stream_id), so deriving a substream is O(1) and
// independent of how much the parent has been consumed. Distinct stream ids
// give statistically independent sequences; identical (seed, stream_id)
// replays the identical sequence.
//
// The integer and uniform layers are bit-identical everywhere. Draws that go
// through libm (normal, gamma) are bit-identical for a given toolchain;
// normals use Box-Muller with a cached spare, and that choice is part of the
// reproducibility contract.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Child stream keyed by `key`; a pure function of (seed, stream_id, key).
  RngStream substream(std::uint64_t key) const;

  std::uint64_t next_u64();
  double uniform01();     // [0, 1), 53-bit
  double uniform_pos();   // (0, 1], log-safe
  std::uint64_t uniform_below(std::uint64_t bound);  // [0, bound), unbiased

  double standard_normal();

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Fixed scheme for allocating stream ids to (command, cell, replicate)
// tasks; documented so outputs stay reproducible across versions.
std::uint64_t derive_stream_id(std::uint64_t command, std::uint64_t cell, std::uint64_t replicate);

// N(mean, sd^2); sd == 0 returns mean exactly without consuming draws.
double draw_normal(RngStream& rng, double mean, double sd);

// 1 with probability p, else 0.
int draw_bernoulli(RngStream& rng, double p);

// Marsaglia-Tsang; shape < 1 boosted via Gamma(a) = Gamma(a+1) U^(1/a).
double draw_gamma(RngStream& rng, double shape, double scale);

// Chi-squared as Gamma(df/2, 2).
double draw_chisq(RngStream& rng, double df);

// df * scale / chisq(df); the scale is a mean squared residual in practice.
double draw_scaled_inv_chisq(RngStream& rng, std::int64_t df, double scale);

// mean + L z with L the (semidefinite-tolerant) Cholesky factor of cov.
std::vector<double> draw_mvn(RngStream& rng, std::span<const double> mean, const Matrix& cov);

}  // namespace mdi
