/*
 * Copyright 2026 The SAGE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SAGE_SAGE_HPP_
#define SAGE_SAGE_HPP_

#include "sage/error.hpp"
#include "sage/tensor.hpp"
#include "sage/npy.hpp"
#include "sage/csv.hpp"
#include "sage/bundle.hpp"
#include "sage/parallel.hpp"
#include "sage/similarity.hpp"
#include "sage/rng.hpp"
#include "sage/selector.hpp"
#include "sage/metrics.hpp"
#include "sage/prompts.hpp"
#include "sage/synth.hpp"
#include "sage/report.hpp"

#endif  // SAGE_SAGE_HPP_
