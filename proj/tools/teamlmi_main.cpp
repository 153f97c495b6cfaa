// Copyright (c) the teamlmi contributors.
// SPDX-License-Identifier: Apache-2.0

#include "teamlmi/cli.hpp"

int main(int argc, char** argv) { return teamlmi::cli::run(argc, argv); }
