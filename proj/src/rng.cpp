#include "renhd/rng.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace renhd {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id & 0xffffffffu),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

void RngStream::save_state(std::ostream& os) const {
  os << seed_ << ' ' << stream_id_ << ' ' << engine_ << ' ' << normal_ << ' '
     << uniform_;
}

void RngStream::load_state(std::istream& is) {
  is >> seed_ >> stream_id_ >> engine_ >> normal_ >> uniform_;
  if (!is) throw IoError("corrupt rng state in checkpoint");
}

}  // namespace renhd
