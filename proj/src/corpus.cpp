#include "cdho/corpus.hpp"

#include <cmath>
#include <random>

namespace cdho {

std::vector<CorpusFunction> make_corpus(int count, std::uint64_t seed, double L) {
  std::mt19937_64 rng(seed);
  // explicit mapping of raw draws keeps the corpus identical across standard libraries
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<CorpusFunction> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int m = 1 + static_cast<int>(rng() % 3);
    CorpusFunction f;
    for (int k = 0; k < m; ++k) {
      Packet p;
      p.amplitude = std::polar(0.2 + 0.8 * unit(), 2.0 * M_PI * unit());
      p.width = 0.5 + 1.5 * unit();
      p.center = (unit() - 0.5) * 0.5 * L;
      p.momentum = 4.0 * unit() - 2.0;
      f.push_back(p);
    }
    out.push_back(std::move(f));
  }
  return out;
}

Field sample(const CorpusFunction& f, const Grid& g) {
  return Field::sample(g, Space::Position, [&f](const Eigen::VectorXd& x) {
    cd v = 0.0;
    for (const Packet& p : f) {
      double r2 = 0.0, kx = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        r2 += (x(i) - p.center) * (x(i) - p.center);
        kx += p.momentum * x(i);
      }
      v += p.amplitude * std::polar(std::exp(-r2 / (2.0 * p.width * p.width)), kx);
    }
    return v;
  });
}

}  // namespace cdho
