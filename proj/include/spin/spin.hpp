// Copyright 2026 The spin-inversion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef SPIN__SPIN_HPP_
#define SPIN__SPIN_HPP_

#include "spin/bench.hpp"
#include "spin/block_matrix.hpp"
#include "spin/cost_model.hpp"
#include "spin/dense_tile.hpp"
#include "spin/error.hpp"
#include "spin/executor.hpp"
#include "spin/lu_baseline.hpp"
#include "spin/matrix_io.hpp"
#include "spin/spin_inversion.hpp"
#include "spin/trace.hpp"

#endif  // SPIN__SPIN_HPP_
