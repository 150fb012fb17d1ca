/*
 * Copyright 2026 The pcosync Authors
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

#pragma once

#include "pcosync/abstraction.hpp"
#include "pcosync/check.hpp"
#include "pcosync/concrete.hpp"
#include "pcosync/dense.hpp"
#include "pcosync/dtmc.hpp"
#include "pcosync/error.hpp"
#include "pcosync/io.hpp"
#include "pcosync/params.hpp"
#include "pcosync/pctl.hpp"
#include "pcosync/population.hpp"
#include "pcosync/reduction.hpp"
#include "pcosync/scalar.hpp"
#include "pcosync/simulate.hpp"
#include "pcosync/solvers.hpp"
