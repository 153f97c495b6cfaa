// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TEAMLMI_TEAMLMI_HPP_
#define TEAMLMI_TEAMLMI_HPP_

#include "teamlmi/corpus.hpp"
#include "teamlmi/io.hpp"
#include "teamlmi/lift.hpp"
#include "teamlmi/lmi.hpp"
#include "teamlmi/model.hpp"
#include "teamlmi/oracle.hpp"
#include "teamlmi/solver.hpp"
#include "teamlmi/types.hpp"

#endif  // TEAMLMI_TEAMLMI_HPP_
