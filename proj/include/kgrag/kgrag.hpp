// Copyright 2026 The kgrag Authors
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

#include "kgrag/embedding.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/extractor.hpp"
#include "kgrag/fuzzy.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/ingest.hpp"
#include "kgrag/layer.hpp"
#include "kgrag/metrics.hpp"
#include "kgrag/normalizer.hpp"
#include "kgrag/paths.hpp"
#include "kgrag/retrieval.hpp"
#include "kgrag/retriever.hpp"
#include "kgrag/run_config.hpp"
#include "kgrag/strings.hpp"
