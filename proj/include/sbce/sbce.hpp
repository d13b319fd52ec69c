// SPDX-License-Identifier: Apache-2.0
//
// sbce — sparse Bayesian channel estimation for pilot-assisted OFDM
// Copyright (C) 2026 the sbce contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SBCE_SBCE_HPP
#define SBCE_SBCE_HPP

// Umbrella header: pulls in the whole library.

#include <sbce/channel.hpp>
#include <sbce/dictionary.hpp>
#include <sbce/harness.hpp>
#include <sbce/lasso.hpp>
#include <sbce/model.hpp>
#include <sbce/quadrature.hpp>
#include <sbce/rng.hpp>
#include <sbce/rvm.hpp>
#include <sbce/rwf.hpp>
#include <sbce/specfun.hpp>
#include <sbce/vmp.hpp>

#endif // SBCE_SBCE_HPP
