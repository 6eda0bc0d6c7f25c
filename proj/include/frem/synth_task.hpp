#pragma once

#include <cstdint>

#include "frem/data.hpp"

namespace frem {

// Biased binary classification task: feature x0 carries the given correlation
// with the sensitive attribute and the label depends on x0 and the
// S-independent feature x1, so a fair model can stay predictive.
//   S ~ N(0,1); x0 = corr S + sqrt(1-corr^2) eps; x1..x_{d-1} ~ N(0,1)
//   y ~ Bernoulli(sigmoid(1.5 x0 + 2.5 x1))
SampleBatch make_biased_classification(int n, int d, double corr, std::uint64_t seed);

}  // namespace frem
