/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include "sgdrift/butterfly.hpp"
#include "sgdrift/genstream.hpp"
#include "sgdrift/harness.hpp"
#include "sgdrift/sgdd.hpp"
#include "sgdrift/sgdp.hpp"
#include "sgdrift/signal.hpp"
#include "sgdrift/signal_io.hpp"
#include "sgdrift/stream_model.hpp"
#include "sgdrift/uwgo.hpp"

namespace sgdrift {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sgdrift
