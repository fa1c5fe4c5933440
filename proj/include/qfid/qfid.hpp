// Copyright 2026 The qfid Authors
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

#include "qfid/bounds.hpp"
#include "qfid/campaign.hpp"
#include "qfid/complex_matrix.hpp"
#include "qfid/eigen.hpp"
#include "qfid/errors.hpp"
#include "qfid/metrics.hpp"
#include "qfid/rng.hpp"
#include "qfid/state_io.hpp"
#include "qfid/states.hpp"
#include "qfid/tolerances.hpp"
#include "qfid/version.hpp"
