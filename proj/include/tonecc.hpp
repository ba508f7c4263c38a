// Copyright 2026 The tonecc Authors
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

// Umbrella header for the library (the HTTP service lives in
// tonecc/service.hpp and pulls in cpp-httplib).

#include "tonecc/dataset.hpp"
#include "tonecc/eigentf.hpp"
#include "tonecc/error.hpp"
#include "tonecc/image.hpp"
#include "tonecc/io.hpp"
#include "tonecc/oracle.hpp"
#include "tonecc/serialize.hpp"
#include "tonecc/style.hpp"
#include "tonecc/synth.hpp"
#include "tonecc/transform.hpp"
