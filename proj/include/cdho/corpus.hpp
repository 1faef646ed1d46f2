#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cdho/grid.hpp"

namespace cdho {

// Sum of Gaussian wave packets; sampled on any grid so that refinement compares like with like.
struct Packet {
  std::complex<double> amplitude;
  double width, center, momentum;
};

using CorpusFunction = std::vector<Packet>;

// Deterministic for a given seed: 1 to 3 packets each, widths in [0.5, 2], centres within
// a quarter box of the origin, momenta in [−2, 2].
std::vector<CorpusFunction> make_corpus(int count, std::uint64_t seed, double L);

Field sample(const CorpusFunction& f, const Grid& g);

}  // namespace cdho
