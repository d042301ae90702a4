#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace catou {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// A stream is identified by (seed, stream id); draws within a stream are
// produced by incrementing the counter, so any replica's stream can be
// reconstructed without touching the others.
class Philox4x32 {
public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) {
    key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (idx_ == 4) {
      buf_ = block(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      idx_ = 0;
    }
    return buf_[idx_++];
  }

  // uniform on (0,1), never exactly 0 or 1
  double uniform() {
    std::uint64_t hi = (*this)() >> 5, lo = (*this)() >> 6;
    return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
  }

  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }

private:
  Key key_;
  Counter ctr_;
  Counter buf_{};
  int idx_ = 4;
};

// Stream ids for the harness are (check tag << 32) | replica so checks never
// share draws.
inline std::uint64_t stream_id(std::uint32_t tag, std::uint64_t replica) {
  return (std::uint64_t{tag} << 32) ^ replica;
}

}  // namespace catou
