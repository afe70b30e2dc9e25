// Copyright 2026 The clineval Authors.
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

#ifndef CLINEVAL_CLINEVAL_HPP_
#define CLINEVAL_CLINEVAL_HPP_

#include "clineval/analysis.hpp"
#include "clineval/concepts.hpp"
#include "clineval/data.hpp"
#include "clineval/embeddings.hpp"
#include "clineval/error.hpp"
#include "clineval/greedy_match.hpp"
#include "clineval/io_util.hpp"
#include "clineval/likelihood.hpp"
#include "clineval/pipeline.hpp"
#include "clineval/refscores.hpp"
#include "clineval/rouge.hpp"
#include "clineval/text.hpp"

#endif  // CLINEVAL_CLINEVAL_HPP_
