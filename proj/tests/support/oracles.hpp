/*
 * Copyright (c) 2026, The owntrans Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OWNTRANS_TESTS_ORACLES_HPP_
#define OWNTRANS_TESTS_ORACLES_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "owntrans/explorer.hpp"
#include "owntrans/model.hpp"
#include "owntrans/term.hpp"

namespace owntrans::testing {

// Six atoms: agent A, nonces N1 and N2, constant C, and the key pair of K.
std::vector<Term> SixAtoms();

// Every kind-correct term over `atoms` with at most `max_depth` constructor
// levels above the atoms.
std::vector<Term> EnumerateTerms(const std::vector<Term>& atoms, int max_depth);

// Uniform-ish random kind-correct term of depth <= max_depth.
Term RandomTerm(std::mt19937_64& rng, const std::vector<Term>& atoms, int max_depth);

struct OracleAnswer {
  bool derivable = false;
  // False when rounds ran out while the known set was still growing.
  bool saturated = false;
  int rounds = 0;
};

/**
 * Brute-force intruder deduction: starting from `facts`, applies every
 * analysis rule (projection, decryption with a known key) and every
 * synthesis rule (pairing, encryption) in rounds, at most `max_rounds`
 * rounds. Synthesis is limited to subterms of the facts and the target,
 * which is complete for the question "is target derivable".
 */
OracleAnswer BruteForceDerivable(std::span<const Term> facts, Term target,
                                 int max_rounds = 6);

/**
 * Length of the shortest path from the initial state to a state where
 * `id` triggers, by iterative deepening depth-first search up to
 * `max_depth`. Independent of the breadth-first explorer: its own
 * search order and its own visited table keyed by the full state encoding.
 */
std::optional<int> ShortestTriggerIddfs(const System& sys, PropertyId id, int max_depth);

// Bundled scenario file path for `name` (e.g. "base").
std::string ScenarioPath(const std::string& name);
System LoadSystem(const std::string& name);

}  // namespace owntrans::testing

#endif  // OWNTRANS_TESTS_ORACLES_HPP_
