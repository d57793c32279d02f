// Copyright 2026 The catgrow Authors
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

// Core library.  The number-basis oracle (fock.hpp, needs Eigen) and the
// JSON/IO helpers (config.hpp, io.hpp) are included separately.

#pragma once

#include "catgrow/decoherence.hpp"
#include "catgrow/device.hpp"
#include "catgrow/errors.hpp"
#include "catgrow/heralding.hpp"
#include "catgrow/loss.hpp"
#include "catgrow/measures.hpp"
#include "catgrow/phase_space.hpp"
#include "catgrow/protocol.hpp"
#include "catgrow/pulse.hpp"
#include "catgrow/quadrature.hpp"
#include "catgrow/thermal_channel.hpp"
