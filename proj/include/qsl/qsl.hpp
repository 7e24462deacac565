// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qsl/circuit.hpp"
#include "qsl/clifford.hpp"
#include "qsl/common.hpp"
#include "qsl/costs.hpp"
#include "qsl/hardness.hpp"
#include "qsl/locality.hpp"
#include "qsl/pauli_algebra.hpp"
#include "qsl/records.hpp"
#include "qsl/shadow_io.hpp"
#include "qsl/shadows.hpp"
#include "qsl/state.hpp"
#include "qsl/target.hpp"
#include "qsl/trainer.hpp"
#include "qsl/trotter.hpp"
