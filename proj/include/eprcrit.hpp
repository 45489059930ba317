// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "eprcrit/count_table.hpp"
#include "eprcrit/criteria.hpp"
#include "eprcrit/entropy.hpp"
#include "eprcrit/error.hpp"
#include "eprcrit/grid_prob.hpp"
#include "eprcrit/ingest.hpp"
#include "eprcrit/matrix.hpp"
#include "eprcrit/simulate.hpp"
#include "eprcrit/states.hpp"
