#pragma once

// Acceptance checks shared by the acceptance test binary and `bsmimo selftest`.

#include "bsmimo/config.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace bsmimo::acceptance
{

struct Outcome
{
  int id;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

Outcome free_space_exactness();
Outcome plus_minus_one_dichotomy();
Outcome common_factor_cancellation();
Outcome mirror_pair_orthogonality();
Outcome evm_oracle_equivalence();
Outcome quadrature();
// Uses the perturbation, antenna and seed of `shipped`; scenario count and separation are fixed.
Outcome monte_carlo_contract(const RunConfig& shipped);
Outcome io_round_trips();

std::vector<Outcome> run_all(const RunConfig& shipped, const std::function<void(const Outcome&)>& on_result = {});

std::string format_line(const Outcome& outcome);

} // namespace bsmimo::acceptance
