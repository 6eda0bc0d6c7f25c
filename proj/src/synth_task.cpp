#include "frem/synth_task.hpp"

#include <cmath>
#include <stdexcept>

#include "frem/rng.hpp"

namespace frem {

SampleBatch make_biased_classification(int n, int d, double corr, std::uint64_t seed) {
  if (n < 1 || d < 2) throw std::invalid_argument("make_biased_classification: need n >= 1, d >= 2");
  if (!(corr >= 0.0 && corr < 1.0)) {
    throw std::invalid_argument("make_biased_classification: corr must lie in [0, 1)");
  }

  Rng rng = Rng(seed).derive(0x62696173ULL);
  SampleBatch batch;
  batch.X.resize(n, d);
  batch.S.resize(n);
  batch.Y.emplace(n);
  const double residual = std::sqrt(1.0 - corr * corr);
  for (int i = 0; i < n; ++i) {
    const double s = rng.normal();
    batch.S(i) = s;
    batch.X(i, 0) = corr * s + residual * rng.normal();
    for (int c = 1; c < d; ++c) batch.X(i, c) = rng.normal();
    const double logit = 1.5 * batch.X(i, 0) + 2.5 * batch.X(i, 1);
    const double prob = 1.0 / (1.0 + std::exp(-logit));
    (*batch.Y)(i) = rng.uniform() < prob ? 1.0 : 0.0;
  }
  return batch;
}

}  // namespace frem
