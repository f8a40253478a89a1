/*
Copyright 2026 The pvg Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef PVG_PVG_HPP_
#define PVG_PVG_HPP_

#include "pvg/alignment.hpp"
#include "pvg/autopilot.hpp"
#include "pvg/engine.hpp"
#include "pvg/error.hpp"
#include "pvg/frame.hpp"
#include "pvg/geometry.hpp"
#include "pvg/image.hpp"
#include "pvg/io.hpp"
#include "pvg/metrics.hpp"
#include "pvg/refinement.hpp"
#include "pvg/renderer.hpp"
#include "pvg/sequence.hpp"

#endif  // PVG_PVG_HPP_
