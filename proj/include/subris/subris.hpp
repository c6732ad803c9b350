// Copyright 2026 The subris Authors.
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

#ifndef SUBRIS_SUBRIS_HPP_
#define SUBRIS_SUBRIS_HPP_

#include "subris/channel.hpp"
#include "subris/fp.hpp"
#include "subris/harness/config.hpp"
#include "subris/harness/csv.hpp"
#include "subris/harness/experiment.hpp"
#include "subris/model.hpp"
#include "subris/powermin.hpp"
#include "subris/solvers/box_qcqp.hpp"
#include "subris/solvers/common.hpp"
#include "subris/solvers/quad_max.hpp"
#include "subris/solvers/rcg.hpp"
#include "subris/solvers/socp.hpp"
#include "subris/solvers/spectral.hpp"
#include "subris/sumrate.hpp"
#include "subris/surrogates.hpp"
#include "subris/types.hpp"

#endif  // SUBRIS_SUBRIS_HPP_
