#include "lightpath/rng.hpp"

namespace lightpath {

std::uint64_t CounterRng::Below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits in 64 bits.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t r = Next();
    if (r >= limit) return r % bound;
  }
}

}  // namespace lightpath
