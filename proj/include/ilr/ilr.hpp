#ifndef ILR_ILR_HPP
#define ILR_ILR_HPP

// Imprecise logistic regression: interval features, unknown labels,
// envelope prediction and uncertainty-aware evaluation.

#include "ilr/classify.hpp"
#include "ilr/dataset.hpp"
#include "ilr/envelope.hpp"
#include "ilr/error.hpp"
#include "ilr/glm.hpp"
#include "ilr/interval.hpp"
#include "ilr/io.hpp"
#include "ilr/rng.hpp"

#define ILR_VERSION "0.1.0"

#endif
