// Copyright 2026 The sbhm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SBHM_SBHM_HPP
#define SBHM_SBHM_HPP

#include "sbhm/errors.hpp"
#include "sbhm/potentials.hpp"
#include "sbhm/hamiltonian.hpp"
#include "sbhm/spectrum.hpp"
#include "sbhm/random.hpp"
#include "sbhm/dynamics.hpp"
#include "sbhm/experiments.hpp"

#endif  // SBHM_SBHM_HPP
