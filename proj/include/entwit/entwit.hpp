// Copyright 2026 The entwit Authors
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

#pragma once

#include "entwit/comparison.hpp"
#include "entwit/csv.hpp"
#include "entwit/decision_stats.hpp"
#include "entwit/dense_oracle.hpp"
#include "entwit/errors.hpp"
#include "entwit/figures.hpp"
#include "entwit/gate_engine.hpp"
#include "entwit/json_io.hpp"
#include "entwit/oracle_check.hpp"
#include "entwit/protocols.hpp"
#include "entwit/resource_model.hpp"
#include "entwit/sampling.hpp"
#include "entwit/state_model.hpp"
