#pragma once

#include <json.hpp>

#include "tcs/shock_model.hpp"

// The three synthetic two-triangle data sets (15 x 15, p = 1.8):
//   1  cell-wise umbrella and array-specific shocks
//   2  row-wise umbrella and array-specific shocks
//   3  split-diagonal umbrella shocks (split after accident period 10) with
//      row-wise array-specific shocks
// CoVs are chained so that nu_ij = C nu_pi and nu_ij = K nu_pi^(n) hold in
// every cell, making each model auto-balanced.
namespace tcs::datasets {

struct Multiples {
  double umbrella;        // C^(n)
  double array_specific;  // K^(n)
};

// Throws std::invalid_argument unless which is 1, 2 or 3.
Multiples multiples(int which, std::size_t array);
ShockModel build(int which);

// Resolved configuration document, with notes on how short input vectors
// were extended.
nlohmann::json generate(int which);

}  // namespace tcs::datasets
