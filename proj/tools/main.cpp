// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/cli.hpp"

int main(int argc, char** argv) { return tempreg::run_cli(argc, argv); }
