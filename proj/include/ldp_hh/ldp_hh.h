// Copyright 2026 The ldp-hh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDP_HH_LDP_HH_H_
#define LDP_HH_LDP_HH_H_

#include "ldp_hh/bitstogram.h"
#include "ldp_hh/core.h"
#include "ldp_hh/ecc.h"
#include "ldp_hh/gf2.h"
#include "ldp_hh/hadamard.h"
#include "ldp_hh/harness.h"
#include "ldp_hh/oracles.h"
#include "ldp_hh/randomness.h"
#include "ldp_hh/result.h"
#include "ldp_hh/treehist.h"

#endif  // LDP_HH_LDP_HH_H_
