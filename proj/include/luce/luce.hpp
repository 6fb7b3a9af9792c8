/*
   Copyright 2026 The LUCE Simulator Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#pragma once

#include "luce/address.hpp"
#include "luce/canonical.hpp"
#include "luce/catalog.hpp"
#include "luce/chainio.hpp"
#include "luce/clock.hpp"
#include "luce/contracts.hpp"
#include "luce/costmodel.hpp"
#include "luce/datastore.hpp"
#include "luce/decimal.hpp"
#include "luce/errors.hpp"
#include "luce/harness.hpp"
#include "luce/ledger.hpp"
#include "luce/platform.hpp"
#include "luce/protocol.hpp"
#include "luce/scenario.hpp"
#include "luce/sha256.hpp"
