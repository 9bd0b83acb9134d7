// Copyright 2026 The bitgate Authors
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

#include "bitgate/blindness_monitor.hpp"
#include "bitgate/errors.hpp"
#include "bitgate/mat2.hpp"
#include "bitgate/multiphoton_oracle.hpp"
#include "bitgate/protocol_engine.hpp"
#include "bitgate/quantum_measure.hpp"
#include "bitgate/rng.hpp"
#include "bitgate/security_analysis.hpp"
#include "bitgate/serialize.hpp"
#include "bitgate/temporal_model.hpp"
