#pragma once

#include "renhd/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>

namespace renhd {

/// Deterministic random stream keyed by (seed, stream_id). Every replica owns
/// one stream and the exchange scheduler owns another, so results do not
/// depend on how work is interleaved across threads.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Uniform integer in [0, n).
  int uniform_int(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(engine_);
  }

  Vector normal_vector(int d) {
    Vector z(d);
    for (int i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Engine + distribution state round-trips through text streams (used by
  // checkpoint files).
  void save_state(std::ostream& os) const;
  void load_state(std::istream& is);

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace renhd
