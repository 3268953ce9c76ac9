// Copyright 2026 The Exemplar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXEMPLAR_EXEMPLAR_HPP
#define EXEMPLAR_EXEMPLAR_HPP

#include <exemplar/bench.hpp>
#include <exemplar/config.hpp>
#include <exemplar/core.hpp>
#include <exemplar/es.hpp>
#include <exemplar/fixtures.hpp>
#include <exemplar/gd.hpp>
#include <exemplar/generator.hpp>
#include <exemplar/mlp.hpp>
#include <exemplar/oracle.hpp>
#include <exemplar/plugin.hpp>
#include <exemplar/rng.hpp>

#endif  // EXEMPLAR_EXEMPLAR_HPP
