// Copyright 2026 The Shared Transform Authors. All Rights Reserved.
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

// Umbrella header for the shared transform library.

#include "stm/error.hpp"
#include "stm/types.hpp"
#include "stm/sparsity.hpp"
#include "stm/objective.hpp"
#include "stm/transform_update.hpp"
#include "stm/shared_transform.hpp"
#include "stm/identification.hpp"
#include "stm/features/image.hpp"
#include "stm/features/hog.hpp"
#include "stm/features/extract.hpp"
#include "stm/features/augment.hpp"
#include "stm/evaluation/folds.hpp"
#include "stm/evaluation/cmc.hpp"
#include "stm/evaluation/synthetic.hpp"
#include "stm/evaluation/protocol.hpp"
#include "stm/io/csv.hpp"
#include "stm/io/pgm.hpp"
#include "stm/io/manifest.hpp"
#include "stm/io/model_file.hpp"
#include "stm/io/config.hpp"
#include "stm/io/dataset.hpp"
#include "stm/io/report.hpp"
